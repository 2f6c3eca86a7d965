"""Minimal graphs over model manifolds.

Radial graphs over rotationally symmetric manifolds are built exactly from
the conserved flux eta^(m-1) u'/W = c and analysed with staggered (midpoint)
fluxes, so every discrete divergence telescopes. Affine t-graphs on the
doubly-warped manifold are handled through the reduced equation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from min_graph.errors import ArgumentError, FeasibilityError, GridShapeError, ManifoldError, PreconditionError
from min_graph.model_manifold import ModelManifold, ricci_diag, sphere_area

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-6
GAUSS_POINTS = 5


def _uniform_grid(r: np.ndarray) -> float:
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or r.size < 3:
        raise GridShapeError(f"radial grid must be 1-d with at least 3 points, got shape {r.shape}")
    steps = np.diff(r)
    dr = (r[-1] - r[0]) / (r.size - 1)
    if dr <= 0 or np.max(np.abs(steps - dr)) > 1e-9 * max(1.0, abs(r[-1])):
        raise GridShapeError("radial grid must be increasing and uniform")
    return float(dr)


@dataclass
class RadialFunction:
    """A radial function sampled on a uniform grid of a model manifold."""

    manifold: ModelManifold
    r: np.ndarray
    values: np.ndarray
    d1: np.ndarray | None = None

    def __post_init__(self) -> None:
        """Check shapes."""
        self.dr = _uniform_grid(self.r)
        if np.shape(self.values) != np.shape(self.r):
            raise GridShapeError("values and grid differ in shape")
        if self.d1 is None:
            self.d1 = np.gradient(self.values, self.dr, edge_order=2)
        elif np.shape(self.d1) != np.shape(self.r):
            raise GridShapeError("derivative and grid differ in shape")


@dataclass
class RadialGraph:
    """The graph of a radial function u over a rotationally symmetric manifold.

    ``du`` holds u' at the nodes. ``flux`` is the conserved quantity
    eta^(m-1) u'/W when the graph came from a flux solve.
    """

    manifold: ModelManifold
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    flux: float | None = None
    dr: float = field(init=False)

    def __post_init__(self) -> None:
        """Check the grid and array shapes."""
        self.dr = _uniform_grid(self.r)
        if np.shape(self.u) != np.shape(self.r) or np.shape(self.du) != np.shape(self.r):
            raise GridShapeError("u, du and r must share one shape")
        if self.manifold.kind != "rotsym":
            raise ManifoldError("radial graphs live on rotationally symmetric manifolds")

    @property
    def W(self) -> np.ndarray:  # noqa: N802
        """Slope function sqrt(1 + |Du|^2)."""
        return np.sqrt(1.0 + self.du**2)

    @property
    def eta_power(self) -> np.ndarray:
        """eta^(m-1) at the nodes."""
        return self.manifold.eta.value(self.r) ** (self.manifold.m - 1)

    def midpoints(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Midpoint radii, difference slopes and W there."""
        rm = 0.5 * (self.r[1:] + self.r[:-1])
        slope = np.diff(self.u) / self.dr
        return rm, slope, np.sqrt(1.0 + slope**2)

    def as_function(self) -> RadialFunction:
        """The height function as a RadialFunction."""
        return RadialFunction(self.manifold, self.r, self.u, self.du)

    @classmethod
    def from_function(cls, manifold: ModelManifold, r: np.ndarray, u: np.ndarray, du: np.ndarray | None = None) -> RadialGraph:
        """Graph of sampled u; du defaults to second-order differences."""
        r = np.asarray(r, dtype=float)
        u = np.asarray(u, dtype=float)
        if du is None:
            du = np.gradient(u, _uniform_grid(r), edge_order=2)
        return cls(manifold, r, u, np.asarray(du, dtype=float))


@dataclass
class TGraph:
    """u(t) = a t + b on the doubly-warped manifold."""

    manifold: ModelManifold
    a: float
    b: float = 0.0

    def __post_init__(self) -> None:
        """Require the doubly-warped family and a finite slope."""
        if self.manifold.kind != "kw":
            raise ManifoldError("t-graphs live on the doubly-warped manifold")
        if not np.isfinite(self.a):
            raise ArgumentError("slope a must be finite")

    def height(self, t: np.ndarray | float) -> np.ndarray:
        """u at t."""
        return self.a * np.asarray(t, dtype=float) + self.b

    def slope(self, r: np.ndarray | float) -> np.ndarray:
        """|Du| = |a| / f(r)."""
        return abs(self.a) / self.manifold.f.value(r)

    def W(self, r: np.ndarray | float) -> np.ndarray:  # noqa: N802
        """Slope function at r."""
        return np.sqrt(1.0 + self.slope(r) ** 2)

    def sup_slope(self, r: np.ndarray) -> float:
        """max over the grid of a/f(r)."""
        return float(np.max(self.slope(r)))


def radial_flux_solution(man: ModelManifold, c: float, r0: float, r1: float, n: int) -> RadialGraph:
    """Radial minimal graph with flux c and u(r0) = 0.

    u' = c / sqrt(eta^(2(m-1)) - c^2) is integrated with Gauss-Legendre
    quadrature on every grid interval.

    Raises:
        FeasibilityError: If eta^(m-1) <= |c| somewhere on [r0, r1].
    """
    if man.kind != "rotsym":
        raise ManifoldError("flux solutions need a rotationally symmetric manifold")
    if not 0 < r0 < r1:
        raise ArgumentError(f"need 0 < r0 < r1, got r0={r0}, r1={r1}")
    if n < 3:
        raise ArgumentError(f"need n >= 3, got {n}")
    r = np.linspace(r0, r1, n)
    dr = (r1 - r0) / (n - 1)
    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_POINTS)
    samples = 0.5 * (r[1:] + r[:-1])[:, None] + 0.5 * dr * nodes[None, :]
    m1 = man.m - 1

    def slope(x: np.ndarray) -> np.ndarray:
        power = man.eta.value(x) ** m1
        bad = power <= abs(c)
        if np.any(bad):
            where = float(np.sort(x[bad].ravel())[0])
            raise FeasibilityError(f"flux |c|={abs(c):g} too large: eta^(m-1) <= |c| at r={where:.6g}")
        return c / np.sqrt(power**2 - c**2)

    du = slope(r)
    increments = 0.5 * dr * (slope(samples) @ weights)
    u = np.concatenate([[0.0], np.cumsum(increments)])
    logger.debug("flux solution c=%g on [%g, %g], n=%d, u(r1)=%.12g", c, r0, r1, n, u[-1])
    return RadialGraph(man, r, u, du, flux=float(c))


def flux_drift(graph: RadialGraph) -> float:
    """Max relative deviation of eta^(m-1) u'/W from its mean."""
    q = graph.eta_power * graph.du / graph.W
    scale = max(abs(float(np.mean(q))), np.finfo(float).tiny)
    return float(np.max(np.abs(q - np.mean(q))) / scale)


@dataclass
class ResidualProfile:
    """A residual sampled at interior nodes."""

    r: np.ndarray
    values: np.ndarray

    @property
    def max(self) -> float:
        """Max absolute value."""
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    @property
    def argmax(self) -> float:
        """Radius of the max."""
        return float(self.r[np.argmax(np.abs(self.values))]) if self.values.size else float("nan")


def _divergence(graph: RadialGraph, face_flux: np.ndarray) -> np.ndarray:
    return np.diff(face_flux) / (graph.dr * graph.eta_power[1:-1])


def mse_residual(graph: RadialGraph) -> ResidualProfile:
    """Discrete div(Du/W) with midpoint fluxes, at interior nodes."""
    rm, slope, wm = graph.midpoints()
    face = graph.manifold.eta.value(rm) ** (graph.manifold.m - 1) * slope / wm
    return ResidualProfile(graph.r[1:-1], np.abs(_divergence(graph, face)))


def graph_laplacian(graph: RadialGraph, phi: np.ndarray) -> ResidualProfile:
    """Laplace-Beltrami operator of the graph metric applied to radial phi.

    Conservative form (1/(W eta^(m-1))) (eta^(m-1) phi'/W)' at interior nodes.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != graph.r.shape:
        raise GridShapeError("phi must be sampled on the graph grid")
    rm, _, wm = graph.midpoints()
    face = graph.manifold.eta.value(rm) ** (graph.manifold.m - 1) * (np.diff(phi) / graph.dr) / wm
    return ResidualProfile(graph.r[1:-1], _divergence(graph, face) / graph.W[1:-1])


def w_operator(graph: RadialGraph, phi: np.ndarray) -> ResidualProfile:
    """W^2 div_g(W^-2 grad_g phi) for radial phi, at interior nodes.

    Radially this is (W/eta^(m-1)) (eta^(m-1) phi'/W^3)'.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != graph.r.shape:
        raise GridShapeError("phi must be sampled on the graph grid")
    rm, _, wm = graph.midpoints()
    face = graph.manifold.eta.value(rm) ** (graph.manifold.m - 1) * (np.diff(phi) / graph.dr) / wm**3
    return ResidualProfile(graph.r[1:-1], graph.W[1:-1] * _divergence(graph, face))


def t_graph_residual(
    g: TGraph, u_tt: np.ndarray | float = 0.0, r: np.ndarray | float = 0.0, u_t: np.ndarray | float | None = None
) -> np.ndarray:
    """Reduced minimal surface operator u_tt / (f^2 W^3) for u = u(t).

    Args:
        g: The t-graph (supplies the manifold and the default slope a).
        u_tt: Second t-derivative of u; 0 for affine u.
        r: Radius where f is evaluated.
        u_t: First t-derivative; defaults to g.a.
    """
    fr = g.manifold.f.value(r)
    ut = g.a if u_t is None else np.asarray(u_t, dtype=float)
    w = np.sqrt(1.0 + (ut / fr) ** 2)
    return np.asarray(u_tt, dtype=float) / (fr**2 * w**3)


@dataclass
class CurvatureProfile:
    """Pointwise extrinsic quantities of a radial graph."""

    r: np.ndarray
    second_fundamental_form: np.ndarray
    hessian: np.ndarray
    ricci_normal: np.ndarray

    def hessian_inequality_margin(self, W: np.ndarray) -> float:  # noqa: N803
        """min of |II|^2 - W^-6 |D^2 u|^2."""
        return float(np.min(self.second_fundamental_form - W**-6 * self.hessian))


def _second_derivative(graph: RadialGraph) -> np.ndarray:
    return np.gradient(graph.du, graph.dr, edge_order=2)


def hessian_norm(graph: RadialGraph) -> np.ndarray:
    """|D^2 u|^2 = u''^2 + (m-1) (eta' u'/eta)^2 for radial u."""
    eta, deta, _ = graph.manifold.eta(graph.r)
    return _second_derivative(graph) ** 2 + (graph.manifold.m - 1) * (deta * graph.du / eta) ** 2


def second_fundamental_form_norm(graph: RadialGraph) -> np.ndarray:
    """|II|^2 = W^-2 (u''^2/W^4 + (m-1)(eta' u'/eta)^2)."""
    eta, deta, _ = graph.manifold.eta(graph.r)
    w = graph.W
    u2 = _second_derivative(graph)
    return (u2**2 / w**4 + (graph.manifold.m - 1) * (deta * graph.du / eta) ** 2) / w**2


def curvature_profile(graph: RadialGraph) -> CurvatureProfile:
    """|II|^2, |D^2 u|^2 and Ric(n, n) on the grid."""
    ric_rr = ricci_diag(graph.manifold, graph.r).entries["r"]
    return CurvatureProfile(
        r=graph.r,
        second_fundamental_form=second_fundamental_form_norm(graph),
        hessian=hessian_norm(graph),
        ricci_normal=graph.du**2 * ric_rr / graph.W**2,
    )


@dataclass
class JacobiResult:
    """Residual of the Jacobi equation for 1/W."""

    residual: ResidualProfile
    mse_max: float
    warning: str | None = None

    @property
    def max(self) -> float:
        """Max absolute residual."""
        return self.residual.max


def jacobi_residual(graph: RadialGraph, tol: float = RESIDUAL_TOL) -> JacobiResult:
    """Delta_g(1/W) + (|II|^2 + Ric(n,n)) / W at interior nodes.

    A graph whose mse residual exceeds 100 tol is still evaluated but the
    result carries a warning.
    """
    mse_max = mse_residual(graph).max
    warning = None
    if mse_max > 100 * tol:
        warning = f"graph is not minimal: mse residual {mse_max:.3e} > {100 * tol:.1e}"
        logger.warning(warning)
    w = graph.W
    prof = curvature_profile(graph)
    lap = graph_laplacian(graph, 1.0 / w)
    potential = (prof.second_fundamental_form + prof.ricci_normal)[1:-1] / w[1:-1]
    return JacobiResult(ResidualProfile(lap.r, lap.values + potential), mse_max, warning)


def w_equation_residual(graph: RadialGraph) -> ResidualProfile:
    """W^2 div(W^-2 grad W) - (|II|^2 + Ric(n,n)) W, the Jacobi equation written for W."""
    w = graph.W
    prof = curvature_profile(graph)
    op = w_operator(graph, w)
    return ResidualProfile(op.r, op.values - ((prof.second_fundamental_form + prof.ricci_normal) * w)[1:-1])


@dataclass
class AsymptoticAverages:
    """Averages of |Du|^2 and R^2 |D^2 u|^2 over growing regions {r0 <= r <= R}."""

    radii: np.ndarray
    gradient_sq: np.ndarray
    scaled_hessian_sq: np.ndarray


def asymptotic_averages(graph: RadialGraph, radii: np.ndarray) -> AsymptoticAverages:
    """Region averages of |Du|^2 and R^2 |D^2 u|^2 (trends only, nothing asserted)."""
    weight = graph.eta_power
    hess = hessian_norm(graph)
    grad_sq = graph.du**2
    avg_g, avg_h = [], []
    for radius in np.asarray(radii, dtype=float):
        mask = graph.r <= radius
        if mask.sum() < 2:
            raise ArgumentError(f"region radius {radius} holds fewer than two grid points")
        vol = np.trapezoid(weight[mask], graph.r[mask])
        avg_g.append(np.trapezoid(grad_sq[mask] * weight[mask], graph.r[mask]) / vol)
        avg_h.append(radius**2 * np.trapezoid(hess[mask] * weight[mask], graph.r[mask]) / vol)
    return AsymptoticAverages(np.asarray(radii, dtype=float), np.array(avg_g), np.array(avg_h))


@dataclass
class AnnulusCutoff:
    """phi = 1 on B_R, 0 outside B_2R, linear in between (|Dphi| = 1/R)."""

    R: float  # noqa: N815

    def __post_init__(self) -> None:
        """R must be positive."""
        if self.R <= 0:
            raise ArgumentError(f"cutoff radius must be positive, got {self.R}")

    def value(self, r: np.ndarray) -> np.ndarray:
        """phi(r)."""
        return np.clip(2.0 - np.asarray(r, dtype=float) / self.R, 0.0, 1.0)

    def gradient(self, r: np.ndarray) -> np.ndarray:
        """|phi'(r)|."""
        r = np.asarray(r, dtype=float)
        return np.where((r > self.R) & (r < 2 * self.R), 1.0 / self.R, 0.0)


@dataclass
class CaccioppoliResult:
    """Both sides of the Caccioppoli inequality."""

    lhs: float
    rhs: float
    alpha: float
    shift: float
    equation_residual: float

    @property
    def margin(self) -> float:
        """rhs - lhs."""
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        """lhs <= rhs."""
        return self.lhs <= self.rhs


def caccioppoli_check(
    u: RadialFunction,
    phi: AnnulusCutoff,
    alpha: float,
    a_r: np.ndarray | None = None,
    residual_tol: float = 1e-4,
) -> CaccioppoliResult:
    """Compare int phi^2 |Du|^2 with 4 alpha^2 int v^2 |Dphi|^2 for v = u - u(r0).

    The inequality is checked for the shifted v, not for u itself: v vanishes
    at the inner end r0 of the grid, which removes the inner boundary term.
    The shift u(r0) is returned in the result. u must solve
    (eta^(m-1) a_r u')' = 0 discretely (relative residual below residual_tol).

    Raises:
        ArgumentError: If phi does not vanish at the outer end of the grid.
        PreconditionError: If u does not solve the equation.
    """
    r = u.r
    if phi.value(r[-1]) != 0.0:
        raise ArgumentError(f"cutoff is not compactly supported on the grid (phi({r[-1]:g}) != 0)")
    if alpha <= 0:
        raise ArgumentError(f"ellipticity constant must be positive, got {alpha}")
    coeff = np.ones_like(r) if a_r is None else np.asarray(a_r, dtype=float)
    if coeff.shape != r.shape:
        raise GridShapeError("a_r must be sampled on the grid of u")
    man = u.manifold
    weight = man.eta.value(r) ** (man.m - 1)
    # face fluxes of the divergence-form equation
    wm = man.eta.value(0.5 * (r[1:] + r[:-1])) ** (man.m - 1)
    face = wm * 0.5 * (coeff[1:] + coeff[:-1]) * np.diff(u.values) / u.dr
    scale = max(float(np.max(np.abs(face))), np.finfo(float).tiny)
    residual = float(np.max(np.abs(np.diff(face)))) / scale
    if residual > residual_tol:
        raise PreconditionError(f"u does not solve the divergence-form equation: relative residual {residual:.3e}")
    shift = float(u.values[0])
    values = u.values - shift
    omega = sphere_area(man.m)
    lhs = omega * np.trapezoid(phi.value(r) ** 2 * u.d1**2 * weight, r)
    rhs = 4 * alpha**2 * omega * np.trapezoid(values**2 * phi.gradient(r) ** 2 * weight, r)
    return CaccioppoliResult(float(lhs), float(rhs), float(alpha), shift, residual)
