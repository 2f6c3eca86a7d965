"""Abstract base for report persistence backends.

Defines the interface for writing and reading JSON reports and CSV series.
Implementations (e.g. PersistFiles) provide concrete storage.
"""

from abc import ABC, abstractmethod
from collections.abc import Mapping

import numpy as np

from min_graph.report_model_dto import ReportDTO


class PersistBase(ABC):
    """Abstract base class for report persistence.

    Names are report stems such as "gradient-bound-canonical"; the backend
    decides where and how they are stored.
    """

    @abstractmethod
    def write_report(self, name: str, report: ReportDTO) -> str:
        """Store the report under name. Returns its location."""
        pass

    @abstractmethod
    def read_report(self, name: str) -> ReportDTO:
        """Load a stored report."""
        pass

    @abstractmethod
    def list_reports(self) -> list[str]:
        """Return the names of all stored reports."""
        pass

    @abstractmethod
    def write_series(self, name: str, columns: Mapping[str, np.ndarray]) -> str:
        """Store equally long columns as a table. Returns its location."""
        pass

    @abstractmethod
    def read_series(self, name: str) -> dict[str, np.ndarray]:
        """Load a stored table as named columns."""
        pass
