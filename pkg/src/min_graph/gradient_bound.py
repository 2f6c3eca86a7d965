"""Explicit gradient bound for solutions of the minimal surface equation.

The bound reads

    sqrt(1 + |Du(x)|^2) <= max{sqrt(1 + a0^2 g*^2), sqrt(a3/(a3 - a2))}
                           * (e^{LR(sqrt(eps^2+1) - eps)} - 1)
                           / (e^{LR(sqrt(eps^2+1) - sqrt(eps^2 + r^2/R^2) - q g)} - 1)

and is evaluated in the log domain: LR easily exceeds 700.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import optimize

from min_graph.errors import ArgumentError, FeasibilityError, HypothesisError, PreconditionError
from min_graph.model_manifold import ricci_diag, ricci_l_lower
from min_graph.mse import RadialGraph, TGraph
from min_graph.warp import EuclideanWarp

if TYPE_CHECKING:
    from min_graph.counterexample import Certificate

logger = logging.getLogger(__name__)

OPT_RESTARTS = 5
OPT_BUDGET = 2000
INFEASIBLE_PENALTY = 1e6
LOG_MAX = math.log(np.finfo(float).max)


class BoundInputs(BaseModel):
    """Problem data: dimension, curvature scales, radii and oscillation."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    m: int = Field(..., ge=2, description="Dimension")
    kappa: float = Field(0.0, ge=0, description="Ric >= -(m-1) kappa^2")
    kbar: float = Field(0.0, ge=0, description="Ric^(l)(grad r) >= -kbar^2/(1+r^2)")
    R: float = Field(..., gt=0, description="Outer radius")  # noqa: N815
    R1: float = Field(..., gt=0, description="Inner radius")  # noqa: N815
    gamma_star: float = Field(..., gt=0, description="(sup_{B_R1} u - inf_{B_R} u)/R")

    @model_validator(mode="after")
    def _radii(self) -> BoundInputs:
        if not self.R1 < self.R:
            raise ValueError(f"need R1 < R, got R1={self.R1}, R={self.R}")
        return self

    @property
    def kbar0(self) -> float:
        """max(1, kbar)."""
        return max(1.0, self.kbar)


class KorevaarParams(BaseModel):
    """The free parameters (eps, tau, q, a0, L)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    eps: float = Field(..., gt=0)
    tau: float = Field(..., gt=0, lt=1)
    q: float = Field(..., gt=0)
    a0: float = Field(..., gt=0)
    L: float = Field(..., gt=0)  # noqa: N815

    def a1(self, inp: BoundInputs) -> float:
        """(1 - tau)(q^2 - 1/(tau a0^2 g*^2)) L^2."""
        return (1 - self.tau) * (self.q**2 - 1.0 / (self.tau * self.a0**2 * inp.gamma_star**2)) * self.L**2

    def a2(self, inp: BoundInputs) -> float:
        """(m+1) kbar0 L / (eps R)."""
        return (inp.m + 1) * inp.kbar0 * self.L / (self.eps * inp.R)

    def a3(self, inp: BoundInputs) -> float:
        """a1 - (m-1) kappa^2."""
        return self.a1(inp) - (inp.m - 1) * inp.kappa**2

    def constants(self, inp: BoundInputs) -> dict[str, float]:
        """a1, a2, a3 for audit."""
        return {"a1": self.a1(inp), "a2": self.a2(inp), "a3": self.a3(inp)}


@dataclass
class Constraint:
    """One strict inequality with its slack (positive when satisfied)."""

    name: str
    slack: float

    @property
    def holds(self) -> bool:
        """slack > 0."""
        return self.slack > 0


@dataclass
class ValidityReport:
    """All parameter constraints."""

    constraints: list[Constraint]

    @property
    def passed(self) -> bool:
        """All strict inequalities hold."""
        return all(c.holds for c in self.constraints)

    @property
    def failed(self) -> list[str]:
        """Names of violated constraints."""
        return [c.name for c in self.constraints if not c.holds]

    def as_dict(self) -> dict[str, Any]:
        """JSON-ready form."""
        return {
            "passed": self.passed,
            "failed": self.failed,
            "slack": {c.name: c.slack for c in self.constraints},
        }


def validate_params(inp: BoundInputs, p: KorevaarParams) -> ValidityReport:
    """Evaluate par_1b (two sides) and par_2 with their slacks."""
    upper = (math.sqrt(p.eps**2 + 1) - math.sqrt((inp.R1 / inp.R) ** 2 + p.eps**2)) / inp.gamma_star
    lower = 1.0 / (math.sqrt(p.tau) * p.a0 * inp.gamma_star)
    return ValidityReport(
        [
            Constraint("par_1b_upper", upper - p.q),
            Constraint("par_1b_lower", p.q - lower),
            Constraint("par_2", p.a1(inp) - p.a2(inp) - (inp.m - 1) * inp.kappa**2),
        ]
    )


@dataclass(frozen=True)
class LogBound:
    """A positive bound stored as its logarithm."""

    log_value: float

    @property
    def value(self) -> float:
        """exp(log_value), inf on overflow."""
        return math.exp(self.log_value) if self.log_value < LOG_MAX else math.inf

    def __le__(self, other: LogBound) -> bool:
        """Compare in the log domain."""
        return self.log_value <= other.log_value

    def __lt__(self, other: LogBound) -> bool:
        """Compare in the log domain."""
        return self.log_value < other.log_value


def log_expm1(x: float) -> float:
    """log(e^x - 1) for x > 0 without overflow."""
    if x <= 0:
        raise FeasibilityError(f"log_expm1 needs x > 0, got {x}")
    if x > 30:
        return x + math.log1p(-math.exp(-x))
    return math.log(math.expm1(x))


def _log_prefactor(inp: BoundInputs, p: KorevaarParams) -> float:
    a2, a3 = p.a2(inp), p.a3(inp)
    first = 0.5 * math.log1p(p.a0**2 * inp.gamma_star**2)
    if a3 <= a2:
        raise FeasibilityError(f"a3 - a2 = {a3 - a2:.3e} is not positive")
    return max(first, 0.5 * math.log(a3 / (a3 - a2)))


def bound_exponents(inp: BoundInputs, p: KorevaarParams, r: float, gamma: float) -> tuple[float, float]:
    """Numerator and denominator exponents of the ratio factor."""
    lr = p.L * inp.R
    root = math.sqrt(p.eps**2 + 1)
    num = lr * (root - p.eps)
    den = lr * (root - math.sqrt(p.eps**2 + (r / inp.R) ** 2) - p.q * gamma)
    return num, den


def korevaar_bound(inp: BoundInputs, p: KorevaarParams, r: float, gamma: float) -> LogBound:
    """Upper bound for sqrt(1 + |Du|^2) at distance r with normalized height gamma.

    Raises:
        ArgumentError: If r or gamma is outside [0, R1] or [0, gamma*].
        FeasibilityError: If the denominator exponent is not positive.
    """
    if not 0 <= r <= inp.R1 * (1 + 1e-12):
        raise ArgumentError(f"need 0 <= r <= R1, got r={r}")
    if not 0 <= gamma <= inp.gamma_star * (1 + 1e-12):
        raise ArgumentError(f"need 0 <= gamma <= gamma*, got gamma={gamma}")
    num, den = bound_exponents(inp, p, r, gamma)
    if den <= 0:
        raise FeasibilityError(f"denominator exponent {den:.3e} <= 0; parameters violate par_1b")
    return LogBound(_log_prefactor(inp, p) + log_expm1(num) - log_expm1(den))


def canonical_params(delta: float, gamma_star: float, m: int, kbar0: float, R: float) -> KorevaarParams:  # noqa: N803
    """tau = 1/2, eps = delta, q = (1-delta)/(2 sqrt 2 g*), a0 = 2/(q g*), L = 8(m+1) kbar0/(delta R q^2).

    Raises:
        ArgumentError: If delta is outside [1/2, 1) or another input is not positive.
    """
    if not 0.5 <= delta < 1:
        raise ArgumentError(f"delta must lie in [1/2, 1), got {delta}")
    if gamma_star <= 0 or kbar0 <= 0 or R <= 0:
        raise ArgumentError("gamma_star, kbar0 and R must be positive")
    q = (1 - delta) / (2 * math.sqrt(2) * gamma_star)
    return KorevaarParams(
        eps=delta,
        tau=0.5,
        q=q,
        a0=2 / (q * gamma_star),
        L=8 * (m + 1) * kbar0 / (delta * R * q**2),
    )


def helper_constant(alpha: float) -> float:
    """C(alpha) = alpha, valid for (y^alpha - 1)/(y - 1) <= C y^(alpha-1), y > 1, alpha >= 1."""
    if alpha < 1:
        raise ArgumentError(f"helper constant needs alpha >= 1, got {alpha}")
    return alpha


@dataclass(frozen=True)
class CorollaryBound:
    """max{...} C(delta) exp(E g*^2) with its pieces for audit."""

    delta: float
    prefactor: float
    helper: float
    exponent: float
    bound: LogBound = field(repr=False)

    @property
    def log_value(self) -> float:
        """Log of the bound."""
        return self.bound.log_value

    @property
    def value(self) -> float:
        """The bound (inf on overflow)."""
        return self.bound.value


def corollary_bound(delta: float, gamma_star: float, m: int, kbar0: float) -> CorollaryBound:
    """Right-hand side of the delta-parameterized ball estimate.

    Raises:
        ArgumentError: If delta is outside [1/2, 1).
    """
    if not 0.5 <= delta < 1:
        raise ArgumentError(f"delta must lie in [1/2, 1), got {delta}")
    alpha = 2 / (delta * (1 - delta))
    prefactor = max(math.sqrt(1 + 32 * gamma_star**2 / (1 - delta) ** 2), math.sqrt(2))
    helper = helper_constant(alpha)
    exponent = 16 * math.sqrt(2) * (m + 1) * kbar0 / (delta * (1 - delta)) * (alpha - 1) * gamma_star**2
    log_value = math.log(prefactor) + math.log(helper) + exponent
    return CorollaryBound(delta, prefactor, helper, exponent, LogBound(log_value))


def entire_bound(a: float, m: int, kbar0: float) -> CorollaryBound:
    """sup bound for entire solutions with u >= -a(1 + r): the corollary at delta = 1/2, g* = a."""
    if a < 0:
        raise ArgumentError(f"growth slope must be non-negative, got {a}")
    return corollary_bound(0.5, a, m, kbar0)


def entire_bound_limit(a: float, m: int, kbar0: float, radii: np.ndarray) -> np.ndarray:
    """log corollary bounds at delta = 1/2 with g* = a (1 + 1/R) for growing R."""
    return np.array([corollary_bound(0.5, a * (1 + 1 / R), m, kbar0).log_value for R in radii])


def _decode(x: np.ndarray) -> KorevaarParams | None:
    eps, logit_tau, q, a0, big_l = x
    try:
        return KorevaarParams(
            eps=math.exp(eps), tau=1 / (1 + math.exp(-logit_tau)), q=math.exp(q), a0=math.exp(a0), L=math.exp(big_l)
        )
    except (ValueError, OverflowError):
        return None


def _encode(p: KorevaarParams) -> np.ndarray:
    return np.array([math.log(p.eps), math.log(p.tau / (1 - p.tau)), math.log(p.q), math.log(p.a0), math.log(p.L)])


def _objective(inp: BoundInputs, r: float, gamma: float) -> Any:
    def fn(x: np.ndarray) -> float:
        p = _decode(x)
        if p is None:
            return INFEASIBLE_PENALTY * 10
        report = validate_params(inp, p)
        if not report.passed:
            violation = sum(-c.slack for c in report.constraints if not c.holds)
            return INFEASIBLE_PENALTY + min(violation, INFEASIBLE_PENALTY)
        try:
            return korevaar_bound(inp, p, r, gamma).log_value
        except (FeasibilityError, OverflowError, ValueError):
            return INFEASIBLE_PENALTY

    return fn


def feasible_start(inp: BoundInputs, max_doublings: int = 60) -> KorevaarParams | None:
    """Canonical parameters at delta = max(1/2, (1 + R1/R)/2), with L doubled until par_2 holds."""
    delta = min(max(0.5, (1 + inp.R1 / inp.R) / 2), 1 - 1e-9)
    p = canonical_params(delta, inp.gamma_star, inp.m, inp.kbar0, inp.R)
    for _ in range(max_doublings):
        if validate_params(inp, p).passed:
            return p
        p = p.model_copy(update={"L": 2 * p.L})
    return None


@dataclass
class OptimizeResult:
    """Best feasible parameters and the baselines they beat."""

    params: KorevaarParams
    bound: LogBound
    canonical_bound: LogBound | None
    evaluations: int
    starts: int


def optimize_params(
    inp: BoundInputs, r: float, gamma: float, seed: int = 0, budget: int = OPT_BUDGET, restarts: int = OPT_RESTARTS
) -> OptimizeResult:
    """Minimize the bound over feasible parameters with restarted Nelder-Mead in log space.

    Starts are the delta = 1/2 canonical point (when feasible), the adjusted
    canonical point from ``feasible_start`` and random perturbations of it.

    Raises:
        FeasibilityError: If no feasible point was found.
    """
    rng = np.random.default_rng(seed)
    fn = _objective(inp, r, gamma)
    starts: list[KorevaarParams] = []
    canonical_bound = None
    if inp.R1 < inp.R / 2:
        canon = canonical_params(0.5, inp.gamma_star, inp.m, inp.kbar0, inp.R)
        if validate_params(inp, canon).passed:
            starts.append(canon)
            canonical_bound = korevaar_bound(inp, canon, r, gamma)
    adjusted = feasible_start(inp)
    if adjusted is not None:
        starts.append(adjusted)
    if not starts:
        raise FeasibilityError("no feasible starting point; par_2 cannot be met by scaling L")
    base = _encode(starts[-1])
    x_starts = [_encode(s) for s in starts]
    x_starts += [base + rng.normal(scale=0.5, size=base.size) for _ in range(max(0, restarts - len(x_starts)))]

    best_x, best_f, evaluations = None, math.inf, 0
    per_start = max(1, budget // len(x_starts))
    for x0 in x_starts:
        f0 = fn(x0)
        evaluations += 1
        if f0 < best_f:
            best_x, best_f = x0, f0
        res = optimize.minimize(
            fn, x0, method="Nelder-Mead", options={"maxfev": per_start, "xatol": 1e-10, "fatol": 1e-12}
        )
        evaluations += int(res.nfev)
        if res.fun < best_f:
            best_x, best_f = res.x, float(res.fun)
    params = _decode(best_x) if best_x is not None else None
    if params is None or best_f >= INFEASIBLE_PENALTY or not validate_params(inp, params).passed:
        raise FeasibilityError(f"no feasible parameters found after {evaluations} evaluations")
    bound = korevaar_bound(inp, params, r, gamma)
    # decoding can lose the last bits of an unimproved start
    if canonical_bound is not None and canonical_bound < bound:
        params, bound = starts[0], canonical_bound
    logger.debug("optimize_params: log bound %.6g after %d evaluations", bound.log_value, evaluations)
    return OptimizeResult(params, bound, canonical_bound, evaluations, len(x_starts))


def _check_rotsym_hypotheses(graph: RadialGraph, inp: BoundInputs) -> None:
    man = graph.manifold
    if not isinstance(man.eta, EuclideanWarp):
        raise PreconditionError("radial-graph verification samples Euclidean slices; use a Euclidean manifold")
    r = graph.r[graph.r > 0]
    ric_min = float(np.min(ricci_diag(man, r).minimum()))
    if ric_min < -(man.m - 1) * inp.kappa**2 - 1e-12:
        raise HypothesisError(f"Ric >= -(m-1) kappa^2 fails (min Ric {ric_min:.3e})")


def _verify_radial(graph: RadialGraph, inp: BoundInputs, params: KorevaarParams | None, n_s: int, n_theta: int) -> dict[str, Any]:
    _check_rotsym_hypotheses(graph, inp)
    r_in, r_out = float(graph.r[0]), float(graph.r[-1])
    center = 0.5 * (r_in + r_out)
    if inp.R >= min(center - r_in, r_out - center):
        raise PreconditionError(f"ball of radius {inp.R} about r={center:g} leaves the graph annulus [{r_in:g}, {r_out:g}]")
    theta = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)

    def radius_of(s: np.ndarray) -> np.ndarray:
        return np.sqrt(center**2 + s[:, None] ** 2 + 2 * center * s[:, None] * np.cos(theta)[None, :])

    outer = radius_of(np.linspace(0.0, inp.R, n_s))
    u_inf = float(np.min(np.interp(outer, graph.r, graph.u)))
    s = np.linspace(0.0, inp.R1, n_s)
    rho = radius_of(s)
    u = np.interp(rho, graph.r, graph.u)
    w = np.sqrt(1.0 + np.interp(rho, graph.r, graph.du) ** 2)
    gamma = (u - u_inf) / inp.R
    gamma_star = float(np.max(gamma))
    if gamma_star <= 0:
        return {"passed": True, "min_log_margin": math.inf, "gamma_star": 0.0, "constant": True}
    inp = inp.model_copy(update={"gamma_star": gamma_star})
    params = params or feasible_start(inp)
    if params is None or not validate_params(inp, params).passed:
        raise FeasibilityError("no valid parameters for the measured oscillation")
    margins = np.empty_like(w)
    for i, si in enumerate(s):
        for j in range(theta.size):
            bound = korevaar_bound(inp, params, float(si), float(np.clip(gamma[i, j], 0.0, gamma_star)))
            margins[i, j] = bound.log_value - math.log(w[i, j])
    i, j = np.unravel_index(int(np.argmin(margins)), margins.shape)
    return {
        "passed": bool(np.min(margins) > 0),
        "min_log_margin": float(margins[i, j]),
        "worst_point": {"s": float(s[i]), "theta": float(theta[j])},
        "gamma_star": gamma_star,
        "center_r": center,
        "params": params.model_dump(),
        "assumptions": ["distance measured from a point of the Euclidean slice through the pole"],
    }


def _verify_tgraph(
    g: TGraph, inp: BoundInputs, certificate: Certificate | None, params: KorevaarParams | None, n_s: int
) -> dict[str, Any]:
    if certificate is None:
        raise HypothesisError("t-graph verification needs a counterexample certificate for kappa and kbar")
    claims = {c.name: c for c in certificate.claims}
    ricci = claims.get("ricci_positive")
    decay = claims.get("decay_kbar")
    if ricci is None or decay is None or ricci.status != "pass" or decay.status != "pass":
        raise HypothesisError("certificate does not certify Ric >= 0 and the decay bound")
    if inp.kbar < certificate.kbar_decay:
        raise HypothesisError(f"kbar={inp.kbar} is below the certified kbar {certificate.kbar_decay:.6g}")
    f = g.manifold.f
    c_low = float(np.min(f.value(np.linspace(0.0, certificate.r_max, 4097))))
    f0 = float(f.value(0.0))
    a = abs(g.a)
    gamma_star = a * (inp.R1 + inp.R) / (c_low * inp.R) if a > 0 else 0.0
    if gamma_star <= 0:
        return {"passed": True, "min_log_margin": math.inf, "gamma_star": 0.0, "constant": True}
    inp = inp.model_copy(update={"gamma_star": gamma_star})
    params = params or feasible_start(inp)
    if params is None or not validate_params(inp, params).passed:
        raise FeasibilityError("no valid parameters for the t-graph oscillation bound")
    worst = (math.inf, 0.0, 0.0)
    # points with f(0)|t| + r <= R1 lie in B_R1; the axis point at height -|a|R/f(0) lies in B_R
    for t in np.linspace(-inp.R1 / f0, inp.R1 / f0, n_s):
        for r in np.linspace(0.0, inp.R1 - f0 * abs(t), n_s):
            d_low = min(max(r, c_low * abs(t)), inp.R1)
            gamma = min((g.a * t + a * inp.R / f0) / inp.R, gamma_star)
            bound = korevaar_bound(inp, params, float(d_low), float(max(gamma, 0.0)))
            margin = bound.log_value - math.log(float(g.W(r)))
            if margin < worst[0]:
                worst = (margin, float(t), float(r))
    return {
        "passed": bool(worst[0] > 0),
        "min_log_margin": worst[0],
        "worst_point": {"t": worst[1], "r": worst[2]},
        "gamma_star": gamma_star,
        "params": params.model_dump(),
        "assumptions": [
            "dist(o, x) bracketed by max(r, c|t|) <= d <= f(0)|t| + r; lower distance used",
            "inf_{B_R} u <= -|a| R/f(0) gives a lower gamma; inf_{B_R} u >= -|a| R/c gives an upper gamma*",
            "ball centered on the axis r = 0 at t = 0",
        ],
    }


def verify_solution_bound(
    graph: RadialGraph | TGraph,
    inp: BoundInputs,
    params: KorevaarParams | None = None,
    certificate: Certificate | None = None,
    n_samples: int = 41,
    n_theta: int = 64,
) -> dict[str, Any]:
    """Check W(x) <= korevaar_bound on sampled points of B_R1.

    Radial graphs on Euclidean space are sampled on a ball about a point of
    the annulus; t-graphs use the certificate's curvature claims.

    Raises:
        HypothesisError: If the curvature hypotheses are not certified.
    """
    if isinstance(graph, TGraph):
        report = _verify_tgraph(graph, inp, certificate, params, n_samples)
    else:
        report = _verify_radial(graph, inp, params, n_samples, n_theta)
    report["ell"] = max(1, inp.m - 2)
    return report


def decay_hypothesis_margin(graph: RadialGraph, kbar: float) -> float:
    """min over the graph grid of Ric^(l)(grad r)(1 + r^2) + kbar^2, l = max(1, m-2)."""
    man = graph.manifold
    r = graph.r[graph.r > 0]
    ell = max(1, man.m - 2)
    value = ricci_l_lower(man, r, ell, direction="r").value
    return float(np.min(value * (1 + r**2)) + kbar**2)
