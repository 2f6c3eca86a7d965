"""Heat flow for radial uniformly elliptic operators on model manifolds.

L = div(A D.) acts on radial functions through the radial coefficient a_r.
The discretization is a cell-centered finite-volume scheme: cell volumes and
face areas are exact integrals of the model density, so the stiffness matrix
is symmetric with zero row sums and the discrete mass changes only through
boundary fluxes. Kernel runs use the implicit midpoint rule after a few
backward Euler start-up steps. Supersolution flows use backward Euler, which is
monotone.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import integrate, linalg, optimize, special

from min_graph.errors import ArgumentError, FeasibilityError, ManifoldError, PreconditionError, SolverError
from min_graph.model_manifold import ModelManifold, sphere_area, volume_ball
from min_graph.mse import RadialGraph

logger = logging.getLogger(__name__)

Scheme = Literal["midpoint", "implicit-euler"]
Boundary = Literal["reflecting", "clamped"]

MONOTONE_TOL = 1e-10
OUTER_FRACTION = 0.05
OUTER_MASS_LIMIT = 1e-6
STARTUP_STEPS = 4
MAX_HALVINGS = 3
GAUSS_POINTS = 6


@dataclass
class RadialMesh:
    """Cells [faces[i], faces[i+1]] with exact volumes and face areas."""

    manifold: ModelManifold
    faces: np.ndarray
    centers: np.ndarray = field(init=False)
    volumes: np.ndarray = field(init=False)
    areas: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        """Integrate the density over every cell."""
        if self.manifold.kind != "rotsym":
            raise ManifoldError("heat flows run on rotationally symmetric manifolds")
        self.faces = np.asarray(self.faces, dtype=float)
        if self.faces.size < 4 or np.any(np.diff(self.faces) <= 0):
            raise ArgumentError("mesh faces must be increasing with at least three cells")
        self.centers = 0.5 * (self.faces[1:] + self.faces[:-1])
        omega = sphere_area(self.manifold.m)
        nodes, weights = np.polynomial.legendre.leggauss(GAUSS_POINTS)
        half = 0.5 * np.diff(self.faces)
        pts = self.centers[:, None] + half[:, None] * nodes[None, :]
        self.volumes = omega * half * (self.density(pts) @ weights)
        self.areas = omega * self.density(self.faces)

    def density(self, r: np.ndarray) -> np.ndarray:
        """eta^(m-1)."""
        return self.manifold.eta.value(r) ** (self.manifold.m - 1)

    @property
    def dr(self) -> float:
        """Cell width."""
        return float(self.faces[1] - self.faces[0])

    @property
    def has_inner_boundary(self) -> bool:
        """True when the inner face has positive area (annulus)."""
        return bool(self.areas[0] > 0)

    def mass(self, values: np.ndarray) -> float:
        """sum V_i u_i."""
        return float(self.volumes @ values)

    def outer_mass_fraction(self, values: np.ndarray) -> float:
        """Share of |mass| held by the outer OUTER_FRACTION of the mesh."""
        outer = self.centers >= self.faces[-1] - OUTER_FRACTION * (self.faces[-1] - self.faces[0])
        total = float(self.volumes @ np.abs(values))
        return float(self.volumes[outer] @ np.abs(values[outer])) / total if total > 0 else 0.0

    @classmethod
    def ball(cls, man: ModelManifold, r_max: float, n: int) -> RadialMesh:
        """n cells covering [0, r_max]."""
        return cls(man, np.linspace(0.0, r_max, n + 1))

    @classmethod
    def annulus(cls, man: ModelManifold, r_in: float, r_out: float, n: int) -> RadialMesh:
        """n cells covering [r_in, r_out]."""
        if not 0 < r_in < r_out:
            raise ArgumentError(f"need 0 < r_in < r_out, got {r_in}, {r_out}")
        return cls(man, np.linspace(r_in, r_out, n + 1))


@dataclass
class EllipticCoefficient:
    """Radial and angular coefficients of A with ellipticity constant alpha."""

    radial: Callable[[np.ndarray], np.ndarray]
    angular: Callable[[np.ndarray], np.ndarray]
    alpha: float
    label: str = "custom"

    def check(self, r: np.ndarray, tol: float = 1e-12) -> bool:
        """alpha^-1 <= a_r, a_theta <= alpha on r."""
        lo, hi = 1.0 / self.alpha - tol, self.alpha + tol
        return all(bool(np.all((c(r) >= lo) & (c(r) <= hi))) for c in (self.radial, self.angular))

    @classmethod
    def identity(cls) -> EllipticCoefficient:
        """A = I, alpha = 1."""
        return cls(np.ones_like, np.ones_like, 1.0, "identity")

    @classmethod
    def perturbed(cls) -> EllipticCoefficient:
        """a_r = a_theta = 1 + 0.5 sin(2r) exp(-(r-2)^2), alpha = 2."""

        def a(r: np.ndarray) -> np.ndarray:
            r = np.asarray(r, dtype=float)
            return 1.0 + 0.5 * np.sin(2 * r) * np.exp(-((r - 2.0) ** 2))

        return cls(a, a, 2.0, "perturbed")


def build_graph_operator(graph: RadialGraph) -> EllipticCoefficient:
    """L = W Delta_g on radial functions: a_r = 1/W, a_theta = W, alpha = sup W."""
    w = graph.W
    r = graph.r
    return EllipticCoefficient(
        radial=lambda x: np.interp(x, r, 1.0 / w),
        angular=lambda x: np.interp(x, r, w),
        alpha=float(np.max(w)),
        label="graph",
    )


def conductances(mesh: RadialMesh, op: EllipticCoefficient) -> np.ndarray:
    """A_{i+1/2} a_r / (c_{i+1} - c_i) on the interior faces."""
    inner = mesh.faces[1:-1]
    return mesh.areas[1:-1] * op.radial(inner) / np.diff(mesh.centers)


def apply_operator(mesh: RadialMesh, op: EllipticCoefficient, values: np.ndarray) -> np.ndarray:
    """(L_h u)_i = (F_{i+1/2} - F_{i-1/2}) / V_i with zero boundary fluxes."""
    flux = conductances(mesh, op) * np.diff(values)
    padded = np.concatenate([[0.0], flux, [0.0]])
    return np.diff(padded) / mesh.volumes


def face_fluxes(mesh: RadialMesh, op: EllipticCoefficient, values: np.ndarray) -> np.ndarray:
    """Interior face fluxes F_{i+1/2}."""
    return conductances(mesh, op) * np.diff(values)


@dataclass
class HeatState:
    """Cell values at time t with the mass ledger."""

    mesh: RadialMesh
    values: np.ndarray
    t: float = 0.0
    masses: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        """Record the initial mass."""
        self.values = np.asarray(self.values, dtype=float)
        if not self.masses:
            self.masses.append(self.mesh.mass(self.values))

    @property
    def mass(self) -> float:
        """Current weighted mass."""
        return self.masses[-1]


def _clamped_cells(mesh: RadialMesh, boundary: Boundary) -> list[int]:
    if boundary == "reflecting":
        return []
    cells = [mesh.centers.size - 1]
    if mesh.has_inner_boundary:
        cells.insert(0, 0)
    return cells


def heat_step(
    state: HeatState,
    op: EllipticCoefficient,
    dt: float,
    scheme: Scheme = "midpoint",
    boundary: Boundary = "reflecting",
    held: np.ndarray | None = None,
) -> HeatState:
    """Advance one step of d_t u = L u.

    Args:
        state: Current state.
        op: Coefficient field.
        dt: Time step.
        scheme: "midpoint" (second order) or "implicit-euler" (monotone).
        boundary: "reflecting" (zero flux) or "clamped" (boundary cells held).
        held: Values for clamped cells; defaults to their current values.

    Raises:
        SolverError: If the banded solve fails.
    """
    if dt <= 0:
        raise ArgumentError(f"dt must be positive, got {dt}")
    mesh = state.mesh
    n = mesh.centers.size
    g = conductances(mesh, op)
    diag_k = -np.concatenate([g, [0.0]]) - np.concatenate([[0.0], g])
    theta = 0.5 if scheme == "midpoint" else 1.0
    ab = np.zeros((3, n))
    ab[0, 1:] = -theta * dt * g
    ab[1] = mesh.volumes - theta * dt * diag_k
    ab[2, :-1] = -theta * dt * g
    u = state.values
    rhs = mesh.volumes * u
    if theta < 1.0:
        ku = diag_k * u
        ku[:-1] += g * u[1:]
        ku[1:] += g * u[:-1]
        rhs = rhs + (1 - theta) * dt * ku
    for i in _clamped_cells(mesh, boundary):
        ab[1, i] = 1.0
        if i + 1 < n:
            ab[0, i + 1] = 0.0
        if i - 1 >= 0:
            ab[2, i - 1] = 0.0
        rhs[i] = u[i] if held is None else held[i]
    try:
        new = linalg.solve_banded((1, 1), ab, rhs)
    except (linalg.LinAlgError, ValueError) as e:
        raise SolverError(f"banded solve failed at t={state.t:g}: {e}") from e
    if not np.all(np.isfinite(new)):
        raise SolverError(f"non-finite values after step at t={state.t:g}")
    return HeatState(mesh, new, state.t + dt, state.masses + [mesh.mass(new)])


def mollified_delta(mesh: RadialMesh, width: float | None = None) -> np.ndarray:
    """Bump (1 - (r/w)^2)^2 about the pole, w = 4 dr, scaled to mass exactly 1."""
    w = 4 * mesh.dr if width is None else width
    bump = np.clip(1.0 - (mesh.centers / w) ** 2, 0.0, None) ** 2
    if not np.any(bump > 0):
        raise ArgumentError("mollifier narrower than one cell")
    return bump / mesh.mass(bump)


@dataclass
class KernelRun:
    """A kernel evolution with snapshots at the requested times."""

    mesh: RadialMesh
    times: np.ndarray
    snapshots: np.ndarray
    derivatives: np.ndarray
    masses: np.ndarray
    outer_fractions: np.ndarray
    dt: float


def evolve_kernel(
    mesh: RadialMesh,
    op: EllipticCoefficient,
    sample_times: np.ndarray,
    dt: float | None = None,
    startup: int = STARTUP_STEPS,
) -> KernelRun:
    """Evolve the mollified delta, sampling values and d_t H = L_h H.

    ``startup`` backward Euler half-steps precede the midpoint steps.
    """
    sample_times = np.sort(np.asarray(sample_times, dtype=float))
    if sample_times.size == 0 or sample_times[0] <= 0:
        raise ArgumentError("sample times must be positive")
    dt = mesh.dr if dt is None else dt
    state = HeatState(mesh, mollified_delta(mesh))
    snaps, derivs, outer = [], [], [mesh.outer_mass_fraction(state.values)]
    for k in range(startup):
        state = heat_step(state, op, 0.5 * dt, scheme="implicit-euler")
        outer.append(mesh.outer_mass_fraction(state.values))
        if k == 0:
            logger.debug("kernel start-up on %d cells, dt=%g", mesh.centers.size, dt)
    for target in sample_times:
        while state.t < target - 1e-12:
            step = min(dt, target - state.t)
            state = heat_step(state, op, step, scheme="midpoint")
            outer.append(mesh.outer_mass_fraction(state.values))
        snaps.append(state.values.copy())
        derivs.append(apply_operator(mesh, op, state.values))
    return KernelRun(
        mesh=mesh,
        times=sample_times,
        snapshots=np.array(snaps),
        derivatives=np.array(derivs),
        masses=np.array(state.masses),
        outer_fractions=np.array(outer),
        dt=dt,
    )


def euclidean_kernel(m: int, d: np.ndarray, t: float) -> np.ndarray:
    """(4 pi t)^(-m/2) exp(-d^2/(4t))."""
    return (4 * np.pi * t) ** (-m / 2) * np.exp(-np.asarray(d, dtype=float) ** 2 / (4 * t))


@dataclass
class MassReport:
    """Mass ledger verdict."""

    max_drift: float
    passed: bool
    inconclusive: bool
    max_outer_fraction: float


def mass_conservation_check(run: KernelRun, tol: float = 1e-8) -> MassReport:
    """max |mass - 1|; inconclusive once 1e-6 of the mass sits in the outer 5% of the mesh."""
    drift = float(np.max(np.abs(run.masses - 1.0)))
    outer = float(np.max(run.outer_fractions))
    inconclusive = outer > OUTER_MASS_LIMIT
    if inconclusive:
        logger.warning("kernel reached the outer boundary (outer mass fraction %.3e)", outer)
    return MassReport(drift, (not inconclusive) and drift < tol, inconclusive, outer)


@dataclass(frozen=True)
class GaussianConstants:
    """C1..C6 of the two-sided Gaussian bounds and the time-derivative bound."""

    C1: float  # noqa: N815
    C2: float  # noqa: N815
    C3: float  # noqa: N815
    C4: float  # noqa: N815
    C5: float | None = None  # noqa: N815
    C6: float | None = None  # noqa: N815

    def __post_init__(self) -> None:
        """All given constants must be positive and C1 <= C3."""
        given = [c for c in (self.C1, self.C2, self.C3, self.C4, self.C5, self.C6) if c is not None]
        if any(c <= 0 for c in given):
            raise ArgumentError("Gaussian constants must be positive")
        if self.C1 > self.C3:
            raise ArgumentError(f"need C1 <= C3, got C1={self.C1}, C3={self.C3}")


@dataclass
class KernelSamples:
    """H(d, t) samples with |B_sqrt(t)|."""

    d: np.ndarray
    t: np.ndarray
    values: np.ndarray
    ball_volume: np.ndarray

    def __post_init__(self) -> None:
        """Flatten and check shapes."""
        self.d, self.t, self.values, self.ball_volume = (
            np.ravel(np.asarray(x, dtype=float)) for x in (self.d, self.t, self.values, self.ball_volume)
        )
        if not (self.d.size == self.t.size == self.values.size == self.ball_volume.size):
            raise ArgumentError("kernel samples must share one size")


def samples_from_run(run: KernelRun, d_max: float, derivative: bool = False, rel_floor: float = 1e-12) -> KernelSamples:
    """Kernel (or |d_t H|) samples with d <= d_max and value above rel_floor times the peak."""
    data = np.abs(run.derivatives) if derivative else run.snapshots
    keep = run.mesh.centers <= d_max
    d_list, t_list, v_list, b_list = [], [], [], []
    for k, t in enumerate(run.times):
        vals = data[k][keep]
        ok = vals > rel_floor * np.max(np.abs(vals))
        vol = volume_ball(run.mesh.manifold, math.sqrt(t))
        d_list.append(run.mesh.centers[keep][ok])
        v_list.append(vals[ok])
        t_list.append(np.full(ok.sum(), t))
        b_list.append(np.full(ok.sum(), vol))
    return KernelSamples(np.concatenate(d_list), np.concatenate(t_list), np.concatenate(v_list), np.concatenate(b_list))


@dataclass
class SandwichReport:
    """Per-sample verdicts and fitted constants."""

    lower_ok: np.ndarray
    upper_ok: np.ndarray
    fitted: dict[str, float]

    @property
    def passed(self) -> bool:
        """All samples inside the sandwich."""
        return bool(np.all(self.lower_ok) and np.all(self.upper_ok))

    def worst(self, samples: KernelSamples) -> dict[str, float | None]:
        """First failing sample, if any."""
        bad = ~(self.lower_ok & self.upper_ok)
        if not np.any(bad):
            return {"d": None, "t": None}
        i = int(np.argmax(bad))
        return {"d": float(samples.d[i]), "t": float(samples.t[i])}


def fit_gaussian_constants(
    y: np.ndarray, s: np.ndarray, upper: bool, rate_cap: float = 10.0
) -> tuple[float, float]:
    """Tightest (log C, rate) with y <= log C - rate s (upper) or y >= log C - rate s (lower).

    The L1 gap between the line and the data is minimised by linear programming.
    """
    y = np.asarray(y, dtype=float)
    s = np.asarray(s, dtype=float)
    n = y.size
    if upper:
        c = np.array([n, -s.sum()])
        a_ub = np.column_stack([-np.ones(n), s])
        b_ub = -y
    else:
        c = np.array([-n, s.sum()])
        a_ub = np.column_stack([np.ones(n), -s])
        b_ub = y
    res = optimize.linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None), (0.0, rate_cap)], method="highs")
    if not res.success:
        raise SolverError(f"constant fit failed: {res.message}")
    rate = float(res.x[1])
    # the solver honours constraints only up to its feasibility tolerance
    edge = y + rate * s
    intercept = max(float(res.x[0]), float(np.max(edge))) if upper else min(float(res.x[0]), float(np.min(edge)))
    return intercept, rate


def gaussian_sandwich_check(
    samples: KernelSamples, constants: GaussianConstants | None = None, rtol: float = 1e-9
) -> SandwichReport:
    """Check C1 e^{-C2 d^2/t}/|B| <= H <= C3 e^{-C4 d^2/t}/|B| and fit the tightest constants.

    Without ``constants`` the fitted ones are checked.

    Raises:
        ArgumentError: If there are no samples.
    """
    if samples.values.size == 0:
        raise ArgumentError("empty sample set")
    if np.any(samples.values <= 0):
        raise ArgumentError("kernel samples must be positive")
    y = np.log(samples.values) + np.log(samples.ball_volume)
    s = samples.d**2 / samples.t
    log_c3, c4 = fit_gaussian_constants(y, s, upper=True)
    log_c1, c2 = fit_gaussian_constants(y, s, upper=False)
    fitted = {"C1": math.exp(log_c1), "C2": c2, "C3": math.exp(log_c3), "C4": c4}
    if constants is None:
        lo_c, lo_r, hi_c, hi_r = log_c1, c2, log_c3, c4
    else:
        lo_c, lo_r = math.log(constants.C1), constants.C2
        hi_c, hi_r = math.log(constants.C3), constants.C4
    slack = rtol * np.maximum(1.0, np.abs(y))
    lower_ok = y >= lo_c - lo_r * s - slack
    upper_ok = y <= hi_c - hi_r * s + slack
    return SandwichReport(lower_ok, upper_ok, fitted)


def time_derivative_check(
    samples: KernelSamples, constants: GaussianConstants | None = None, rtol: float = 1e-9
) -> dict[str, object]:
    """Check |d_t H| <= C5/t e^{-C6 d^2/t}/|B_sqrt(t)| on |d_t H| samples; fits C5, C6."""
    if samples.values.size == 0:
        raise ArgumentError("empty sample set")
    y = np.log(samples.values) + np.log(samples.t) + np.log(samples.ball_volume)
    s = samples.d**2 / samples.t
    log_c5, c6 = fit_gaussian_constants(y, s, upper=True)
    if constants is not None and constants.C5 is not None and constants.C6 is not None:
        log_c5, c6 = math.log(constants.C5), constants.C6
    ok = y <= log_c5 - c6 * s + rtol * np.maximum(1.0, np.abs(y))
    return {"C5": math.exp(log_c5), "C6": c6, "passed": bool(np.all(ok)), "samples": int(y.size)}


def discrete_fundamental_solution(mesh: RadialMesh, op: EllipticCoefficient, normalize_at: float = 1.0) -> np.ndarray:
    """Radial L_h-harmonic G with constant face flux, scaled so that G(normalize_at) = 1.

    L_h G = 0 on every interior cell except the first, where it is negative.
    """
    g = conductances(mesh, op)
    jumps = -1.0 / g
    values = np.concatenate([[0.0], np.cumsum(jumps)])
    values -= values[-1]
    level = float(np.interp(normalize_at, mesh.centers, values))
    if level <= 0:
        raise ArgumentError("normalization radius lies beyond the mesh")
    return values / level


@dataclass
class FlowReport:
    """Monotonicity verdict of a supersolution flow."""

    passed: bool
    max_increment: float
    min_margin_below_f: float
    min_margin_above_inf: float
    dt: float
    halvings: int
    steps: int


def supersolution_check(mesh: RadialMesh, op: EllipticCoefficient, f: np.ndarray, boundary: Boundary, tol: float) -> np.ndarray:
    """L_h f on free cells; raise if it exceeds tol."""
    lf = apply_operator(mesh, op, f)
    free = np.ones(f.size, dtype=bool)
    free[_clamped_cells(mesh, boundary)] = False
    if boundary == "reflecting":
        free[-1] = False
    bad = free & (lf > tol)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise PreconditionError(f"L f = {lf[i]:.3e} > {tol:.1e} at r={mesh.centers[i]:.6g}")
    return lf


def supersolution_flow(
    f: np.ndarray,
    op: EllipticCoefficient,
    mesh: RadialMesh,
    T: float,  # noqa: N803
    dt: float | None = None,
    boundary: Boundary = "clamped",
    tol: float = MONOTONE_TOL,
) -> FlowReport:
    """Evolve u from f with backward Euler and check d_t u <= 0 and inf f <= u <= f.

    dt is halved (at most MAX_HALVINGS times) when a check trips.

    Raises:
        PreconditionError: If L_h f > tol on a free cell.
    """
    f = np.asarray(f, dtype=float)
    supersolution_check(mesh, op, f, boundary, tol)
    dt = mesh.dr if dt is None else dt
    lo = float(np.min(f))
    report = None
    for halving in range(MAX_HALVINGS + 1):
        state = HeatState(mesh, f.copy())
        worst_inc, below, above, steps = -math.inf, math.inf, math.inf, 0
        while state.t < T - 1e-12:
            new = heat_step(state, op, min(dt, T - state.t), scheme="implicit-euler", boundary=boundary, held=f)
            worst_inc = max(worst_inc, float(np.max(new.values - state.values)))
            below = min(below, float(np.min(f - new.values)))
            above = min(above, float(np.min(new.values - lo)))
            state, steps = new, steps + 1
        passed = worst_inc <= tol and below >= -tol and above >= -tol
        report = FlowReport(passed, worst_inc, below, above, dt, halving, steps)
        if passed:
            break
        logger.debug("supersolution flow tripped (increment %.3e); halving dt", worst_inc)
        dt *= 0.5
    return report


def comparison_principle_check(
    f1: np.ndarray, f2: np.ndarray, op: EllipticCoefficient, mesh: RadialMesh, T: float, dt: float | None = None  # noqa: N803
) -> float:
    """Evolve f1 <= f2 side by side with backward Euler; return min of u2 - u1 over all steps."""
    if np.any(np.asarray(f1) > np.asarray(f2)):
        raise PreconditionError("comparison needs f1 <= f2")
    dt = mesh.dr if dt is None else dt
    s1, s2 = HeatState(mesh, f1), HeatState(mesh, f2)
    worst = float(np.min(s2.values - s1.values))
    while s1.t < T - 1e-12:
        step = min(dt, T - s1.t)
        s1 = heat_step(s1, op, step, scheme="implicit-euler")
        s2 = heat_step(s2, op, step, scheme="implicit-euler")
        worst = min(worst, float(np.min(s2.values - s1.values)))
    return worst


def radial_density(man: ModelManifold) -> Callable[[np.ndarray], np.ndarray]:
    """r-marginal volume density: eta^(m-1), or f eta^(m-2) on slabs of the doubly-warped family."""
    if man.kind == "kw":
        return lambda r: man.f.value(r) * man.eta.value(r) ** (man.m - 2)
    return lambda r: man.eta.value(r) ** (man.m - 1)


@dataclass
class AverageReport:
    """Sequence of averages with the trend verdict."""

    radii: np.ndarray
    averages: np.ndarray
    target: float
    passed: bool
    monotone_tail: bool


def ball_average_limit(
    f: Callable[[np.ndarray], np.ndarray],
    man: ModelManifold,
    radii: np.ndarray,
    infimum: float | None = None,
    rtol: float = 0.02,
) -> AverageReport:
    """Averages (1/|B_R|) int_{B_R} f of a radial f, and whether they approach inf f."""
    radii = np.sort(np.asarray(radii, dtype=float))
    rho = radial_density(man)
    lo = 0.0 if man.eta.contains(0.0) else man.r_min
    avgs = []
    for R in radii:
        num, _ = integrate.quad(lambda x: float(f(np.asarray(x)) * rho(x)), lo, R, limit=400, epsrel=1e-11)
        den, _ = integrate.quad(lambda x: float(rho(x)), lo, R, limit=400, epsrel=1e-11)
        avgs.append(num / den)
    avgs = np.array(avgs)
    if infimum is None:
        grid = np.linspace(lo, radii[-1], 4097)
        infimum = float(np.min(f(grid)))
    tail = avgs[avgs.size // 2 :]
    steps = np.diff(tail)
    monotone = bool(np.all(steps <= 1e-12) or np.all(steps >= -1e-12))
    close = abs(avgs[-1] - infimum) <= rtol * max(1.0, abs(infimum))
    return AverageReport(radii, avgs, float(infimum), close and monotone, monotone)


def weighted_laplacian_average(
    f: np.ndarray,
    op: EllipticCoefficient,
    mesh: RadialMesh,
    radii: np.ndarray,
    tol: float = MONOTONE_TOL,
    decay: float = 0.1,
) -> AverageReport:
    """R^2/|B_R| int_{B_R} L f via telescoped face fluxes.

    Verdict: all terms <= tol and the last magnitude below ``decay`` times the peak.
    """
    f = np.asarray(f, dtype=float)
    supersolution_check(mesh, op, f, "reflecting", tol)
    flux = face_fluxes(mesh, op, f)
    inner = mesh.faces[1:-1]
    cum_vol = np.cumsum(mesh.volumes)
    radii = np.sort(np.asarray(radii, dtype=float))
    values = []
    for R in radii:
        k = int(np.searchsorted(inner, R, side="right")) - 1
        if k < 0:
            raise ArgumentError(f"radius {R} is inside the first cell")
        values.append(inner[k] ** 2 * flux[k] / cum_vol[k])
    values = np.array(values)
    peak = float(np.max(np.abs(values)))
    nonpositive = bool(np.all(values <= tol))
    decayed = peak == 0.0 or abs(values[-1]) < decay * peak
    return AverageReport(radii, values, 0.0, nonpositive and decayed, nonpositive)


@dataclass
class LHopitalReport:
    """Both sides of the de L'Hopital-type inequality."""

    tail_liminf_ratio: float
    integral_liminf_ratio: float
    holds: bool
    inconclusive: bool


def lhopital_liminf(h: np.ndarray, g: np.ndarray, grid: np.ndarray, tail_fraction: float = 0.5, tol: float = 1e-10) -> LHopitalReport:
    """ess-liminf of h/g on the grid tail against the liminf of int_0^r h / int_0^r g.

    Inconclusive when int g grows by less than half over the tail.
    """
    h, g, grid = (np.asarray(x, dtype=float) for x in (h, g, grid))
    if np.any(g <= 0):
        raise ArgumentError("g must be positive")
    if np.any(h < 0):
        raise ArgumentError("h must be non-negative")
    start = int(grid.size * (1 - tail_fraction))
    ih = integrate.cumulative_trapezoid(h, grid, initial=0.0)
    ig = integrate.cumulative_trapezoid(g, grid, initial=0.0)
    tail = slice(max(start, 1), None)
    lhs = float(np.min(h[tail] / g[tail]))
    rhs = float(np.min(ih[tail] / ig[tail]))
    inconclusive = ig[-1] < 1.5 * ig[max(start, 1)]
    return LHopitalReport(lhs, rhs, lhs <= rhs + tol, bool(inconclusive))


def spherical_mean_pairs(f: Callable[[np.ndarray], np.ndarray], man: ModelManifold, grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """h(t) = int_{dB_t} f and g(t) = |dB_t| for radial f."""
    grid = np.asarray(grid, dtype=float)
    area = sphere_area(man.m) * radial_density(man)(grid)
    return area * f(grid), area


@dataclass
class AppendixConstants:
    """Output of the lower-bound constant recipe."""

    c0: float
    gamma: float
    c0_star: float
    C1p: float  # noqa: N815
    C2p: float  # noqa: N815
    bracketed: bool
    target: float


def gamma_of(c0: float, C3p: float, C4p: float, m: int) -> float:  # noqa: N803
    """m C3p int_{sqrt c0}^inf s^(m-1) e^{-C4p s^2} ds, quadrature plus incomplete-gamma tail."""
    lo = math.sqrt(c0)
    hi = lo + 12.0 / math.sqrt(C4p)
    body, _ = integrate.quad(lambda s: s ** (m - 1) * math.exp(-C4p * s * s), lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
    tail = 0.5 * C4p ** (-m / 2) * special.gamma(m / 2) * special.gammaincc(m / 2, C4p * hi * hi)
    return m * C3p * (body + tail)


def appendix_constants(
    C3p: float,  # noqa: N803
    C4p: float,  # noqa: N803
    m: int,
    C_harnack: float,  # noqa: N803
    target: float = 0.75,
    cap: float = 1e6,
) -> AppendixConstants:
    """Constants of the lower Gaussian bound from the upper one and a Harnack constant.

    c0 solves gamma(c0) = target by bisection on (2, cap]. When gamma stays
    above target up to cap, c0 = cap; when gamma(2) is already at or below
    target, c0 = 2 + 2 sqrt 2. In both cases ``bracketed`` is False.

    Raises:
        FeasibilityError: If gamma(cap) >= 1, or the chosen gamma(c0) lies outside (1/2, 1).
    """
    if min(C3p, C4p, C_harnack) <= 0 or m < 2:
        raise ArgumentError("need C3p, C4p, C_harnack > 0 and m >= 2")
    if not 0.5 < target < 1:
        raise ArgumentError(f"target must lie in (0.5, 1), got {target}")
    gamma_cap = gamma_of(cap, C3p, C4p, m)
    if gamma_cap >= 1:
        raise FeasibilityError(f"gamma(c0) >= 1 for all c0 <= {cap:g}")
    bracketed = gamma_of(2.0, C3p, C4p, m) > target > gamma_cap
    if bracketed:
        c0 = optimize.bisect(lambda c: gamma_of(c, C3p, C4p, m) - target, 2.0, cap, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=500)
    elif gamma_cap >= target:
        c0 = cap
    else:
        c0 = 2 + 2 * math.sqrt(2)
    gamma = gamma_of(c0, C3p, C4p, m)
    if not 0.5 < gamma < 1:
        raise FeasibilityError(f"gamma({c0:g}) = {gamma:.6g} lies outside (1/2, 1)")
    c0_star = 2 * c0 / (c0 - 2)
    c1p = (1 - gamma) * math.exp(-(2 + c0 / 2 + c0_star) * C_harnack)
    return AppendixConstants(c0, gamma, c0_star, c1p, 2 * C_harnack, bracketed, target)
