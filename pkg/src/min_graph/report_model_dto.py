"""Report and configuration data transfer objects.

A report is split into a deterministic payload (command, anchor, inputs,
outputs, verdict) and run metadata (version, timestamps, error info). Only the
payload takes part in determinism comparisons.
"""

from __future__ import annotations

import dataclasses
import json
from enum import Enum
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

SCHEMA_VERSION = 1

WarpName = Literal[
    "euclidean", "sphere", "hyperbolic", "constant", "power", "kw-eta", "kw-f", "custom-piecewise"
]


class WarpSpecDTO(BaseModel):
    """A warp function by name and parameters."""

    model_config = ConfigDict(extra="forbid")

    name: WarpName = Field(..., description="Closed form or piecewise identifier")
    params: dict[str, float] = Field(default_factory=dict, description="Named parameters of the closed form")
    left: WarpSpecDTO | None = Field(None, description="Piecewise: warp left of the bridge")
    right: WarpSpecDTO | None = Field(None, description="Piecewise: warp right of the bridge")
    bridge: tuple[float, float] | None = Field(None, description="Piecewise: smoothing interval")


WarpSpecDTO.model_rebuild()


class ManifoldSpecDTO(BaseModel):
    """A model manifold as read from a JSON spec file."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["rotsym", "kw"] = Field(..., description="Rotationally symmetric or doubly warped")
    m: int = Field(..., ge=2, description="Dimension")
    eta: WarpSpecDTO = Field(..., description="Fiber warp")
    f: WarpSpecDTO | None = Field(None, description="t-direction warp, doubly warped only")
    fiber: Literal["round-sphere"] = Field("round-sphere", description="Fiber metric")
    pole: bool = Field(True, description="Check smooth closure at r = 0")

    @model_validator(mode="after")
    def _kind_fields(self) -> ManifoldSpecDTO:
        if self.kind == "kw":
            if self.f is None:
                raise ValueError("doubly-warped manifolds need an f warp")
            if self.m < 4:
                raise ValueError("doubly-warped manifolds need m >= 4")
        elif self.f is not None:
            raise ValueError("rotationally symmetric manifolds take no f warp")
        return self


class MetaDTO(BaseModel):
    """Run metadata excluded from determinism checks."""

    tool_version: str | None = Field(None, description="min_graph version")
    started_at: str | None = Field(None, description="UTC start time, ISO 8601")
    wall_time_s: float | None = Field(None, description="Wall time in seconds")
    error_message: str | None = Field(None, description="Error message if any")
    stack_trace: str | None = Field(None, description="Trace of the error if any")


class ReportDTO(BaseModel):
    """One report: payload plus metadata."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    command: str = Field(..., description="Subcommand or check that produced the report")
    anchor: str = Field(..., description="Tag of the mathematical statement checked")
    schema_version: int = Field(SCHEMA_VERSION, description="Report schema version")
    inputs: dict[str, Any] = Field(default_factory=dict, description="Inputs after defaults were applied")
    outputs: dict[str, Any] = Field(default_factory=dict, description="Computed values and verdicts")
    passed: bool | None = Field(None, description="Overall verdict; None when nothing is asserted")
    meta: MetaDTO = Field(default_factory=MetaDTO, description="Run metadata")

    def to_json(self) -> str:
        """Serialize the whole report with sorted keys."""
        return dump_json(self.model_dump())

    def deterministic_json(self) -> str:
        """Serialize everything except ``meta``."""
        return dump_json(self.model_dump(exclude={"meta"}))


class RunConfig(BaseModel):
    """A --config file. Flags given on the command line win over these values."""

    model_config = ConfigDict(extra="forbid")

    command: str | None = Field(None, description="Subcommand path, e.g. 'gradient-bound canonical'")
    manifold: str | None = Field(None, description="Path to a manifold spec JSON")
    output: str | None = Field(None, description="Report path")
    seed: int = Field(0, description="Random seed")
    grid: dict[str, int] = Field(default_factory=dict, description="Grid size overrides")
    tolerances: dict[str, float] = Field(default_factory=dict, description="Tolerance overrides")
    params: dict[str, Any] = Field(default_factory=dict, description="Other subcommand options")

    def option_defaults(self) -> dict[str, Any]:
        """Flatten into click option names (underscored)."""
        merged: dict[str, Any] = {}
        for source in (self.params, self.grid, self.tolerances):
            merged.update({k.replace("-", "_"): v for k, v in source.items()})
        if self.manifold is not None:
            merged["manifold"] = self.manifold
        if self.output is not None:
            merged["out"] = self.output
        merged["seed"] = self.seed
        return merged


def to_jsonable(obj: Any) -> Any:
    """Convert numpy values, dataclasses and models into plain JSON types."""
    if isinstance(obj, BaseModel):
        return to_jsonable(obj.model_dump())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.repr}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list | tuple):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Enum):
        return obj.value
    return obj


def dump_json(payload: Any) -> str:
    """Sorted, indented JSON; non-finite floats are written as Infinity/NaN."""
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2, allow_nan=True) + "\n"
