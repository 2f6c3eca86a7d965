"""Acceptance checks, one module per check exposing a ``Check`` class."""

SHIPPED_CHECKS = (
    "curvature",
    "comparison_ode",
    "minimal_surface",
    "gradient_estimate",
    "heat_engine",
    "appendix_constants",
    "counterexample",
    "caccioppoli",
)
