"""Numerical laboratory for minimal graphs over manifolds with non-negative Ricci curvature."""

__version__ = "0.1.0"
