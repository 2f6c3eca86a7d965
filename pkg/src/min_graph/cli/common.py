"""Shared plumbing for the subcommands: manifold loading, reports and exit codes."""

import json
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import click
import numpy as np
from icecream import ic
from pydantic import ValidationError

from min_graph import __version__
from min_graph.errors import MinGraphError
from min_graph.model_manifold import ModelManifold, manifold_from_spec
from min_graph.persist_files import PersistFiles
from min_graph.report_model_dto import MetaDTO, ReportDTO, RunConfig

UTC = timezone.utc

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2

ic.configureOutput(prefix="min-graph| ")


def read_json(path: str) -> Any:
    """Parse a JSON file; syntax errors name the line and column."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise click.ClickException(f"cannot read {path}: {e.strerror}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise click.ClickException(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e


def load_config(path: str) -> RunConfig:
    """Read and validate a --config file."""
    try:
        return RunConfig.model_validate(read_json(path))
    except ValidationError as e:
        raise click.ClickException(f"{path}: invalid config: {e}") from e


def config_default_map(config: RunConfig) -> dict[str, Any]:
    """Nest the flattened option defaults under the configured command path."""
    if not config.command:
        return {}
    defaults: dict[str, Any] = config.option_defaults()
    for name in reversed(config.command.split()):
        defaults = {name: defaults}
    return defaults


def load_manifold(path: str) -> ModelManifold:
    """Read a manifold spec JSON."""
    try:
        return manifold_from_spec(read_json(path))
    except ValidationError as e:
        raise click.ClickException(f"{path}: invalid manifold spec: {e}") from e
    except MinGraphError as e:
        raise click.ClickException(f"{path}: {e}") from e


def run_state(ctx: click.Context) -> dict[str, Any]:
    """The group's shared state (output dir, start time)."""
    root = ctx.find_root()
    root.ensure_object(dict)
    state = root.obj
    state.setdefault("started", time.perf_counter())
    state.setdefault("started_at", datetime.now(UTC).isoformat(timespec="seconds"))
    state.setdefault("output_dir", None)
    return state


def make_meta(ctx: click.Context, error: BaseException | None = None, trace: str | None = None) -> MetaDTO:
    """Run metadata for a report."""
    state = run_state(ctx)
    return MetaDTO(
        tool_version=__version__,
        started_at=state["started_at"],
        wall_time_s=round(time.perf_counter() - state["started"], 3),
        error_message=str(error) if error is not None else None,
        stack_trace=trace,
    )


def emit_report(
    ctx: click.Context,
    command: str,
    anchor: str,
    inputs: dict[str, Any],
    outputs: dict[str, Any],
    passed: bool | None,
    out: str | None = None,
    series: dict[str, np.ndarray] | None = None,
) -> int:
    """Persist the report (and an optional CSV series), print a summary, return the exit code."""
    report = ReportDTO(command=command, anchor=anchor, inputs=inputs, outputs=outputs, passed=passed, meta=make_meta(ctx))
    repo = PersistFiles(run_state(ctx)["output_dir"])
    name = out or command.replace(" ", "-")
    location = repo.write_report(name, report)
    click.echo(f"{command}: report written to {location}")
    if series is not None:
        click.echo(f"{command}: series written to {repo.write_series(Path(name).stem + '-series', series)}")
    if passed is False:
        click.secho(f"{command}: asserted checks failed", err=True, fg="red")
        return EXIT_FAILED
    return EXIT_OK


def guarded(fn: Any) -> Any:
    """Run fn, turning library and validation errors into click errors."""
    try:
        return fn()
    except (MinGraphError, ValidationError) as e:
        raise click.ClickException(str(e)) from e
