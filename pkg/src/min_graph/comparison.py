"""ODE comparison barriers for the distance function on a minimal graph.

h'' = H h with h(0) = 0, h'(0) = 1 bounds the graph Laplacian of the distance
by m h'/h. For H = kbar^2 and H = kbar^2/(1+t^2) the bound has a closed form.
psi = sqrt(a^2 + r^2) is the barrier used by the gradient estimate.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from min_graph.errors import ArgumentError, GridShapeError, PreconditionError, WarpDomainError
from min_graph.model_manifold import ModelManifold
from min_graph.mse import RadialGraph, graph_laplacian

logger = logging.getLogger(__name__)

ABS_TOL = 1e-6
REL_TOL = 1e-8

SourceKind = Literal["zero", "const-kappa", "decay-kappa", "custom"]


@dataclass(frozen=True)
class SourceTerm:
    """The non-negative source H of h'' = H h."""

    kind: SourceKind = "zero"
    kbar: float = 0.0
    fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False, repr=False)

    def __call__(self, t: np.ndarray | float) -> np.ndarray:
        """H(t)."""
        t = np.asarray(t, dtype=float)
        match self.kind:
            case "zero":
                return np.zeros_like(t)
            case "const-kappa":
                return np.full_like(t, self.kbar**2)
            case "decay-kappa":
                return self.kbar**2 / (1.0 + t**2)
            case "custom":
                if self.fn is None:
                    raise ArgumentError("custom source needs a callable")
                return np.broadcast_to(np.asarray(self.fn(t), dtype=float), t.shape)
            case _:
                raise ArgumentError(f"unknown source kind {self.kind!r}")

    @classmethod
    def from_spec(cls, spec: Mapping[str, Any]) -> SourceTerm:
        """Build from ``{"name": "const-kappa", "kbar": 1.0}``."""
        name = spec.get("name", "zero")
        if name not in ("zero", "const-kappa", "decay-kappa"):
            raise ArgumentError(f"unknown source {name!r}")
        return cls(kind=name, kbar=float(spec.get("kbar", 0.0)))


@dataclass
class ComparisonProfile:
    """h, h' and h'' on a uniform t grid."""

    t: np.ndarray
    h: np.ndarray
    dh: np.ndarray
    d2h: np.ndarray
    source: SourceTerm

    def residual(self) -> float:
        """max |h'' - H h| with h'' from central differences of h'."""
        dt = self.t[1] - self.t[0]
        d2 = (self.dh[2:] - self.dh[:-2]) / (2 * dt)
        return float(np.max(np.abs(d2 - self.source(self.t[1:-1]) * self.h[1:-1])))

    def log_derivative_margin(self) -> float:
        """min over the grid of t h'/h - 1 (non-negative when H >= 0)."""
        return float(np.min(self.t * self.dh / self.h) - 1.0)

    def series(self) -> dict[str, np.ndarray]:
        """Columns for CSV export."""
        return {"t": self.t, "h": self.h, "dh": self.dh}


def solve_h(H: SourceTerm, t_max: float, n: int) -> ComparisonProfile:  # noqa: N803
    """Solve h'' = H h with fourth-order Runge-Kutta from t0 = t_max/n.

    The start values are the Taylor data of the solution through the pole,
    h(t0) = t0 + H(0) t0^3/6 and h'(t0) = 1 + H(0) t0^2/2.

    Raises:
        PreconditionError: If H is negative at a sample.
    """
    if n < 16:
        raise ArgumentError(f"need n >= 16, got {n}")
    if t_max <= 0:
        raise ArgumentError(f"t_max must be positive, got {t_max}")
    t0 = t_max / n
    t = np.linspace(t0, t_max, n)
    dt = t[1] - t[0]
    h_nodes = H(t)
    h_mid = H(t[:-1] + 0.5 * dt)
    for samples, where in ((h_nodes, t), (h_mid, t[:-1] + 0.5 * dt)):
        if np.any(samples < 0):
            bad = int(np.argmax(samples < 0))
            raise PreconditionError(f"H must be non-negative: H({where[bad]:.6g}) = {samples[bad]:.3e}")
    h0 = float(H(0.0))
    y = np.empty((n, 2))
    y[0] = (t0 + h0 * t0**3 / 6.0, 1.0 + h0 * t0**2 / 2.0)
    for i in range(n - 1):
        h, dh = y[i]
        k1 = (dh, h_nodes[i] * h)
        k2 = (dh + 0.5 * dt * k1[1], h_mid[i] * (h + 0.5 * dt * k1[0]))
        k3 = (dh + 0.5 * dt * k2[1], h_mid[i] * (h + 0.5 * dt * k2[0]))
        k4 = (dh + dt * k3[1], h_nodes[i + 1] * (h + dt * k3[0]))
        y[i + 1, 0] = h + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y[i + 1, 1] = dh + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    logger.debug("solve_h %s kbar=%g: h(%g)=%.12g", H.kind, H.kbar, t_max, y[-1, 0])
    return ComparisonProfile(t=t, h=y[:, 0], dh=y[:, 1], d2h=h_nodes * y[:, 0], source=H)


def power_profile(kbar: float, t: np.ndarray) -> ComparisonProfile:
    """h = t^k' with k'(k'-1) = kbar^2, a supersolution for H = kbar^2/(1+t^2)."""
    t = np.asarray(t, dtype=float)
    k = decay_exponent(kbar)
    return ComparisonProfile(
        t=t, h=t**k, dh=k * t ** (k - 1), d2h=k * (k - 1) * t ** (k - 2), source=SourceTerm("decay-kappa", kbar)
    )


def decay_exponent(kbar: float) -> float:
    """(1 + sqrt(1 + 4 kbar^2)) / 2."""
    return (1.0 + np.sqrt(1.0 + 4.0 * kbar**2)) / 2.0


def comparison_defect(profile: ComparisonProfile, H: SourceTerm | None = None) -> np.ndarray:  # noqa: N803
    """h'' - H h on the profile grid (>= 0 for supersolutions)."""
    source = H or profile.source
    return profile.d2h - source(profile.t) * profile.h


def graph_laplacian_bound(
    m: int, profile: ComparisonProfile, r: np.ndarray | float, closed_form: bool = True
) -> np.ndarray:
    """m h'(r)/h(r), in closed form for the named sources.

    Args:
        m: Dimension.
        profile: Comparison profile; its grid bounds the admissible r.
        r: Radii.
        closed_form: Use m kbar coth(kbar r), m/r or m(1 + sqrt(1+4 kbar^2))/(2r)
            for the named sources instead of interpolating the profile.

    Raises:
        WarpDomainError: If r is outside the profile grid.
    """
    r = np.asarray(r, dtype=float)
    lo, hi = profile.t[0], profile.t[-1]
    if np.any(r < lo) or np.any(r > hi):
        raise WarpDomainError(f"r outside the profile grid [{lo:g}, {hi:g}]")
    src = profile.source
    if closed_form and src.kind != "custom":
        if src.kind == "zero" or src.kbar == 0:
            return m / r
        if src.kind == "const-kappa":
            return m * src.kbar / np.tanh(src.kbar * r)
        return m * decay_exponent(src.kbar) / r
    h = CubicHermiteSpline(profile.t, profile.h, profile.dh)
    dh = CubicHermiteSpline(profile.t, profile.dh, profile.d2h)
    return m * dh(r) / h(r)


@dataclass(frozen=True)
class PsiBarrier:
    """psi = sqrt(a^2 + r^2) with its graph Laplacian bound (m+1) max(1, kbar)/a."""

    a: float
    kbar: float
    m: int

    @property
    def laplacian_bound(self) -> float:
        """Upper bound for Delta_g psi."""
        return (self.m + 1) * max(1.0, self.kbar) / self.a

    def value(self, r: np.ndarray | float) -> np.ndarray:
        """psi(r)."""
        return np.sqrt(self.a**2 + np.asarray(r, dtype=float) ** 2)

    def gradient(self, r: np.ndarray | float) -> np.ndarray:
        """|D psi| = r/sqrt(a^2 + r^2) < 1."""
        return np.asarray(r, dtype=float) / self.value(r)


def psi_barrier(a: float, kbar: float, m: int) -> PsiBarrier:
    """The psi barrier at scale a.

    Raises:
        ArgumentError: If a <= 0.
    """
    if a <= 0:
        raise ArgumentError(f"barrier scale must be positive, got {a}")
    return PsiBarrier(float(a), float(kbar), int(m))


def verify_psi_barrier(graph: RadialGraph, barrier: PsiBarrier, tol: float = ABS_TOL) -> dict[str, Any]:
    """Discrete Delta_g psi against the barrier bound on a minimal radial graph."""
    lap = graph_laplacian(graph, barrier.value(graph.r))
    margin = barrier.laplacian_bound - lap.values
    worst = int(np.argmin(margin))
    return {
        "bound": barrier.laplacian_bound,
        "max_laplacian": float(np.max(lap.values)),
        "worst_margin": float(margin[worst]),
        "worst_r": float(lap.r[worst]),
        "max_gradient": float(np.max(barrier.gradient(graph.r))),
        "passed": bool(np.all(margin >= -tol)),
    }


def verify_graph_comparison(man: ModelManifold, graph: RadialGraph, profile: ComparisonProfile) -> dict[str, Any]:
    """Check Delta_g r = (m-1) eta'/eta <= m h'/h on the graph grid.

    The discrete graph Laplacian of r is reported alongside as a cross-check.

    Raises:
        GridShapeError: If the graph is not over man or leaves the profile grid.
    """
    if graph.manifold is not man and (graph.manifold.kind, graph.manifold.m) != (man.kind, man.m):
        raise GridShapeError("graph is defined over a different manifold")
    if graph.r[0] < profile.t[0] or graph.r[-1] > profile.t[-1]:
        raise GridShapeError(
            f"graph grid [{graph.r[0]:g}, {graph.r[-1]:g}] leaves profile grid [{profile.t[0]:g}, {profile.t[-1]:g}]"
        )
    eta, deta, _ = man.eta(graph.r)
    lap_r = (man.m - 1) * deta / eta
    bound = graph_laplacian_bound(man.m, profile, graph.r)
    margin = bound - lap_r
    tol = ABS_TOL + REL_TOL * np.abs(bound)
    discrete = graph_laplacian(graph, graph.r.copy())
    worst = int(np.argmin(margin))
    return {
        "worst_margin": float(margin[worst]),
        "worst_r": float(graph.r[worst]),
        "discrete_deviation": float(np.max(np.abs(discrete.values - lap_r[1:-1]))),
        "passed": bool(np.all(margin >= -tol)),
    }
