"""Doubly-warped manifold with a non-constant minimal graph of bounded gradient.

The metric is dt^2 f(r)^2 + dr^2 + eta(r)^2 g_S on R x R^(m-1). Affine
functions of t are minimal graphs whose slope a/f is bounded because f >= c.
``certify`` evaluates the curvature claims on a grid and records a verdict per
claim; negative findings are certificate content. ``search_bc`` scans (b, c).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from min_graph.errors import SearchError
from min_graph.model_manifold import ModelManifold, ricci_diag, ricci_l_lower, simple_plane_sectionals
from min_graph.mse import TGraph, t_graph_residual
from min_graph.report_model_dto import SCHEMA_VERSION, dump_json
from min_graph.warp import KWEtaWarp, KWFWarp

logger = logging.getLogger(__name__)

SIGN_TOL = 1e-14
RESIDUAL_TOL = 1e-10
TAIL_START = 0.25
SEARCH_RANGE = (10.0, 1e6)

ClaimStatus = Literal["pass", "fail", "indeterminate", "reported"]


class KWSpec(BaseModel):
    """Parameters of the doubly-warped construction."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    m: int = Field(4, ge=4, description="Dimension")
    alpha: float = Field(0.4, gt=0, lt=1, description="Decay exponent of zeta_1")
    beta: float = Field(0.4, gt=0, lt=1, description="Exponent entering p = (beta + 3 - m)/2")
    b: float = Field(1e3, gt=0, description="Shift inside the power of f")
    c: float = Field(1e3, gt=0, description="Floor of f")
    smoothing: Literal["quintic-hermite"] = Field("quintic-hermite", description="zeta_1 bridge on [1, 2]")

    @model_validator(mode="after")
    def _exponents(self) -> KWSpec:
        if not self.m - 1 - self.beta > 2 + self.alpha:
            raise ValueError(f"need m - 1 - beta > 2 + alpha, got m={self.m}, alpha={self.alpha}, beta={self.beta}")
        return self

    @property
    def p(self) -> float:
        """Exponent of f, negative under the constraint."""
        return (self.beta + 3 - self.m) / 2


class Claim(BaseModel):
    """One certificate line."""

    name: str
    status: ClaimStatus
    asserted: bool = Field(True, description="False for values reported without a verdict")
    worst_value: float | None = Field(None, description="Smallest margin (or reported value)")
    worst_r: float | None = Field(None, description="Where the worst value occurs")
    detail: str = ""


class TermSummary(BaseModel):
    """Grid minimum and tail behaviour of one curvature bracket."""

    minimum: float
    worst_r: float
    tail_power: float
    tail_sign: int


class Certificate(BaseModel):
    """Grid certificate of the construction's claims."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    schema_version: int = SCHEMA_VERSION
    spec: KWSpec
    r_max: float
    n: int
    claims: list[Claim]
    ricci_minima: dict[str, float]
    ricci_printed_minima: dict[str, float]
    terms: dict[str, TermSummary]
    sup_sectional: float
    kbar_decay: float
    t_graph_residual: float
    gradient_bound: float

    def claim(self, name: str) -> Claim:
        """Look up a claim by name."""
        for c in self.claims:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        """All asserted claims pass."""
        return all(c.status == "pass" for c in self.claims if c.asserted)

    def to_json(self) -> str:
        """Sorted, indented JSON."""
        return dump_json(self.model_dump())


def build_kw_manifold(spec: KWSpec, eta: KWEtaWarp | None = None) -> ModelManifold:
    """Doubly-warped manifold with eta from the zeta profile and f = (b + r^2)^p + c.

    Raises:
        WarpConstructionError: If the zeta_1 bridge loses positivity.
        ManifoldError: If the warps do not close at r = 0.
    """
    eta = eta if eta is not None else KWEtaWarp(spec.alpha)
    return ModelManifold(kind="kw", m=spec.m, eta=eta, f=KWFWarp(spec.b, spec.c, spec.p))


def asymptotic_power(r: np.ndarray, values: np.ndarray, start: float = TAIL_START) -> tuple[float, int]:
    """Least-squares power of |values| over r >= start * r_max, and the tail sign (0 if mixed)."""
    r = np.asarray(r, dtype=float)
    values = np.asarray(values, dtype=float)
    tail = (r >= start * r[-1]) & (values != 0)
    if tail.sum() < 2:
        return math.nan, 0
    signs = np.sign(values[tail])
    sign = int(signs[0]) if np.all(signs == signs[0]) else 0
    slope, _ = np.polyfit(np.log(r[tail]), np.log(np.abs(values[tail])), 1)
    return float(slope), sign


def _verdict(margin: float, scale: float = 1.0) -> ClaimStatus:
    tol = SIGN_TOL * max(1.0, scale)
    if margin > tol:
        return "pass"
    if margin < -tol:
        return "fail"
    return "indeterminate"


def _sign_claim(name: str, r: np.ndarray, margin: np.ndarray, detail: str, asserted: bool = True) -> Claim:
    i = int(np.argmin(margin))
    status = _verdict(float(margin[i])) if asserted else "reported"
    return Claim(name=name, status=status, asserted=asserted, worst_value=float(margin[i]), worst_r=float(r[i]), detail=detail)


def certify(spec: KWSpec, r_max: float = 200.0, n: int = 8192, slope: float = 1.0) -> Certificate:
    """Evaluate every claim of the construction on r = r_max/n, ..., r_max."""
    man = build_kw_manifold(spec)
    r = np.linspace(r_max / n, r_max, n)
    _, deta, _ = man.eta(r)
    fv, df, _ = man.f(r)
    claims = []

    eta_margin = np.minimum(deta - 0.5, 1.0 - deta)
    steps = np.diff(deta)
    claims.append(
        Claim(
            name="eta_prime_range",
            status="pass" if np.all(deta > 0.5) and np.all(deta <= 1.0) and np.all(steps <= SIGN_TOL) else "fail",
            worst_value=float(np.min(eta_margin)),
            worst_r=float(r[int(np.argmin(eta_margin))]),
            detail="1/2 < eta' <= 1, non-increasing",
        )
    )
    claims.append(
        Claim(
            name="f_bounds",
            status="pass" if np.all(fv >= spec.c) and np.all(df <= 0) else "fail",
            worst_value=float(np.min(fv - spec.c)),
            worst_r=float(r[int(np.argmin(fv - spec.c))]),
            detail="f >= c, f non-increasing",
        )
    )

    diag = ricci_diag(man, r)
    ric_min = diag.minimum()
    claims.append(_sign_claim("ricci_positive", r, ric_min, "Ric > 0 on every frame direction"))
    printed_min = np.min(np.vstack(list(diag.printed.values())), axis=0)
    claims.append(_sign_claim("ricci_positive_printed", r, printed_min, "entries with (m-3) multiplicities", asserted=False))

    two = ricci_l_lower(man, r, 2)
    pole_terms = np.minimum(two.plane_terms["aa+aa"], two.plane_terms["ra+ra"])
    claims.append(_sign_claim("pole_terms_positive", r, pole_terms, "2(1-eta'^2)/eta^2 and -2 eta''/eta"))
    claims.append(_sign_claim("ricci2_nonnegative", r, two.value, "pointwise Ric^(2) over coordinate planes", asserted=False))
    terms = {}
    for name, values in two.plane_terms.items():
        power, sign = asymptotic_power(r, values)
        i = int(np.argmin(values))
        terms[name] = TermSummary(minimum=float(values[i]), worst_r=float(r[i]), tail_power=power, tail_sign=sign)

    sup_sec = float(np.max(simple_plane_sectionals(man, r).max_abs()))
    claims.append(
        Claim(name="sectional_bound", status="reported", asserted=False, worst_value=sup_sec, detail="sup |Sec| = kbar^2")
    )

    decay = ricci_l_lower(man, r, man.m - 2, direction="r").value * (1.0 + r**2)
    finite = np.isfinite(decay)
    worst = int(np.argmin(np.where(finite, decay, -np.inf)))
    kbar_decay = math.sqrt(max(0.0, -float(np.min(decay)))) if np.all(finite) else math.inf
    claims.append(
        Claim(
            name="decay_kbar",
            status="pass" if np.all(finite) else "fail",
            worst_value=kbar_decay,
            worst_r=float(r[worst]),
            detail="Ric^(m-2)(grad r)(1 + r^2) >= -kbar^2, finite on the grid",
        )
    )

    graph = TGraph(man, slope)
    t = np.linspace(-1.0, 1.0, 201)
    h = t[1] - t[0]
    u = graph.height(t)
    u_tt = (u[2:] - 2 * u[1:-1] + u[:-2]) / h**2
    residual = float(max(np.max(np.abs(t_graph_residual(graph, u_tt, radius))) for radius in r[:: max(1, n // 64)]))
    claims.append(
        Claim(
            name="t_graph_minimal",
            status="pass" if residual < RESIDUAL_TOL else "fail",
            worst_value=residual,
            detail="minimal surface operator of u = a t",
        )
    )
    grad = graph.sup_slope(r)
    claims.append(
        Claim(
            name="bounded_gradient",
            status="pass" if math.isfinite(grad) and grad <= abs(slope) / spec.c else "fail",
            worst_value=grad,
            detail="sup |Du| = a / min f <= a / c",
        )
    )
    cert = Certificate(
        spec=spec,
        r_max=r_max,
        n=n,
        claims=claims,
        ricci_minima={k: float(np.min(v)) for k, v in diag.entries.items()},
        ricci_printed_minima={k: float(np.min(v)) for k, v in diag.printed.items()},
        terms=terms,
        sup_sectional=sup_sec,
        kbar_decay=kbar_decay,
        t_graph_residual=residual,
        gradient_bound=grad,
    )
    logger.debug("certify b=%g c=%g: %s", spec.b, spec.c, {c.name: c.status for c in claims})
    return cert


class SearchResult(BaseModel):
    """Best (b, c) of a search with its certificate."""

    b: float
    c: float
    margin: float
    candidates: int
    certificate: Certificate


def ricci_margin(man: ModelManifold, r: np.ndarray) -> float:
    """min over r of the smallest Ricci entry divided by sup |Sec|."""
    ric = ricci_diag(man, r).minimum()
    sec = simple_plane_sectionals(man, r).max_abs()
    return float(np.min(ric / sec))


def search_bc(
    m: int,
    alpha: float,
    beta: float,
    grid: int = 7,
    r_max: float = 200.0,
    n_search: int = 1024,
    n: int = 8192,
    workers: int | None = None,
) -> SearchResult:
    """Logarithmic grid search over b, c in [10, 1e6] for the largest Ricci margin.

    Raises:
        SearchError: If no pair gives positive Ricci curvature on the grid.
    """
    base = KWSpec(m=m, alpha=alpha, beta=beta)
    eta = KWEtaWarp(alpha)
    values = np.geomspace(*SEARCH_RANGE, grid)
    pairs = [(float(b), float(c)) for b in values for c in values]
    r = np.linspace(r_max / n_search, r_max, n_search)

    def score(pair: tuple[float, float]) -> float:
        spec = base.model_copy(update={"b": pair[0], "c": pair[1]})
        return ricci_margin(build_kw_manifold(spec, eta), r)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        margins = list(pool.map(score, pairs))
    best = int(np.argmax(margins))
    if margins[best] <= 0:
        raise SearchError(f"no (b, c) in [{SEARCH_RANGE[0]:g}, {SEARCH_RANGE[1]:g}]^2 gives Ric > 0 (best margin {margins[best]:.3e})")
    b, c = pairs[best]
    logger.info("search_bc: b=%g c=%g margin=%.3e over %d pairs", b, c, margins[best], len(pairs))
    cert = certify(base.model_copy(update={"b": b, "c": c}), r_max=r_max, n=n)
    return SearchResult(b=b, c=c, margin=margins[best], candidates=len(pairs), certificate=cert)
