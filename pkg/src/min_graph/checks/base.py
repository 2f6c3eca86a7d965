"""Base check interface for the acceptance battery.

Each check module defines a ``Check`` class with validate (optional) and handle.
The suite command loads checks by name and calls validate then handle.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any

from min_graph.errors import ArgumentError


@dataclass
class CheckOutcome:
    """Outputs of one check and its verdict."""

    outputs: dict[str, Any] = field(default_factory=dict)
    passed: bool = True


class BaseCheck(ABC):
    """Abstract base for acceptance checks.

    ``defaults`` holds the full-size settings and ``quick_defaults`` the
    overrides used with --quick. handle returns verdicts; it raises only
    when the check cannot run.
    """

    check_name: str = "base"
    anchor: str = ""
    defaults: dict[str, Any] = {}
    quick_defaults: dict[str, Any] = {}

    def __init__(self, quick: bool = False) -> None:
        """Select full or quick settings."""
        self.quick = quick
        self.settings = dict(self.defaults)
        if quick:
            self.settings.update(self.quick_defaults)

    def validate(self, config: dict[str, Any]) -> None:
        """Reject settings the check does not know."""
        unknown = sorted(set(config) - set(self.defaults))
        if unknown:
            raise ArgumentError(f"{self.check_name}: unknown settings {unknown}")

    def resolve(self, config: dict[str, Any]) -> dict[str, Any]:
        """Defaults overridden by config."""
        return {**self.settings, **config}

    @abstractmethod
    def handle(self, config: dict[str, Any]) -> CheckOutcome:
        """Run the check."""
        pass
