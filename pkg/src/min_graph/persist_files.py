"""File-backed report persistence.

Reports are JSON files with sorted keys and 2-space indentation; series are
CSV files with full float precision. The output directory comes from the
caller or from MIN_GRAPH_OUTPUT_DIR (a .env file is honoured).
"""

import logging
import os
from collections.abc import Mapping
from pathlib import Path

import numpy as np
from dotenv import load_dotenv

from min_graph.errors import ArgumentError
from min_graph.persist_base import PersistBase
from min_graph.report_model_dto import ReportDTO

logger = logging.getLogger(__name__)

OUTPUT_ENV = "MIN_GRAPH_OUTPUT_DIR"


def get_output_dir(default: str = ".") -> Path:
    """Resolve the output directory from the environment, loading .env if present."""
    if os.path.exists(".env"):
        load_dotenv()
    return Path(os.getenv(OUTPUT_ENV, default))


class PersistFiles(PersistBase):
    """Report persistence in a directory of JSON and CSV files."""

    def __init__(self, output_dir: str | Path | None = None) -> None:
        """Use output_dir, or the environment default; the directory is created."""
        self.output_dir = Path(output_dir) if output_dir is not None else get_output_dir()
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def _path(self, name: str, suffix: str) -> Path:
        path = Path(name)
        if path.suffix != suffix:
            path = path.with_name(path.name + suffix)
        return path if path.is_absolute() else self.output_dir / path

    def write_report(self, name: str, report: ReportDTO) -> str:
        """Write <name>.json."""
        path = self._path(name, ".json")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.to_json(), encoding="utf-8")
        logger.debug("wrote report %s", path)
        return str(path)

    def read_report(self, name: str) -> ReportDTO:
        """Read <name>.json."""
        return ReportDTO.model_validate_json(self._path(name, ".json").read_text(encoding="utf-8"))

    def list_reports(self) -> list[str]:
        """Stems of the JSON files in the output directory."""
        return sorted(p.stem for p in self.output_dir.glob("*.json"))

    def write_series(self, name: str, columns: Mapping[str, np.ndarray]) -> str:
        """Write <name>.csv with a header row and %.17g values."""
        arrays = [np.asarray(v, dtype=float).ravel() for v in columns.values()]
        if not arrays or len({a.size for a in arrays}) != 1:
            raise ArgumentError("series columns must be non-empty and equally long")
        path = self._path(name, ".csv")
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, np.column_stack(arrays), fmt="%.17g", delimiter=",", header=",".join(columns), comments="")
        logger.debug("wrote series %s (%d rows)", path, arrays[0].size)
        return str(path)

    def read_series(self, name: str) -> dict[str, np.ndarray]:
        """Read <name>.csv as written by write_series."""
        path = self._path(name, ".csv")
        try:
            table = np.genfromtxt(path, delimiter=",", names=True, dtype=float)
        except (OSError, ValueError) as e:
            raise ArgumentError(f"cannot read series {path}: {e}") from e
        if table.dtype.names is None:
            raise ArgumentError(f"series {path} has no header row")
        return {col: np.atleast_1d(table[col]) for col in table.dtype.names}
