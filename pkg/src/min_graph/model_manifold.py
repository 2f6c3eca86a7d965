"""Model manifolds and their curvature.

Two families are supported. Rotationally symmetric metrics
dr^2 + eta(r)^2 g_S, and doubly-warped metrics f(r)^2 dt^2 + dr^2 + eta(r)^2 h
with h the round unit sphere. In the orthonormal frame (e_t, e_r, e_alpha) the
curvature operator is diagonal on simple coordinate planes, so everything
(sectional, Ricci, l-th Ricci) is computed from four plane curvatures.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import integrate, special

from min_graph.errors import ArgumentError, ManifoldError, PoleError
from min_graph.report_model_dto import ManifoldSpecDTO
from min_graph.warp import WarpFunction, warp_from_spec

logger = logging.getLogger(__name__)

R_MIN = 1e-4
CLOSURE_TOL = 1e-6

# plane classes; frame kinds are "t", "r" and "a" (a fiber direction)
PLANE_OF = {
    frozenset({"t", "r"}): "tr",
    frozenset({"t", "a"}): "ta",
    frozenset({"r", "a"}): "ra",
    frozenset({"a"}): "aa",
}


@dataclass(frozen=True)
class ModelManifold:
    """A model manifold: kind, dimension and warps.

    ``kind`` is "rotsym" or "kw". The fiber is always the round unit sphere.
    With ``pole`` set, smooth closure at r = 0 is checked on construction.
    """

    kind: Literal["rotsym", "kw"]
    m: int
    eta: WarpFunction
    f: WarpFunction | None = None
    pole: bool = True
    fiber: str = "round-sphere"
    r_min: float = field(default=R_MIN, repr=False)

    def __post_init__(self) -> None:
        """Validate kind, dimension, fiber and pole closure."""
        if self.fiber != "round-sphere":
            raise ManifoldError(f"only the round unit sphere fiber is supported, got {self.fiber!r}")
        if self.kind == "rotsym":
            if self.m < 2:
                raise ManifoldError(f"dimension must be >= 2, got {self.m}")
            if self.f is not None:
                raise ManifoldError("rotationally symmetric manifolds take no f warp")
        elif self.kind == "kw":
            if self.m < 4:
                raise ManifoldError(f"doubly-warped manifolds need m >= 4, got {self.m}")
            if self.f is None:
                raise ManifoldError("doubly-warped manifolds need an f warp")
        else:
            raise ManifoldError(f"unsupported manifold kind {self.kind!r}")
        if self.pole:
            self._check_closure()

    def _check_closure(self) -> None:
        r0 = 0.0 if self.eta.contains(0.0) else self.r_min
        v, d1, _ = (float(x) for x in self.eta(r0))
        if abs(v) > 2 * r0 + 1e-12 or abs(d1 - 1.0) > CLOSURE_TOL:
            raise ManifoldError(f"eta does not close at the pole: eta({r0:g})={v:.3e}, eta'={d1:.9f}")
        if self.f is not None:
            r0 = 0.0 if self.f.contains(0.0) else self.r_min
            _, fd1, fd2 = (float(x) for x in self.f(r0))
            if abs(fd1) > 2 * r0 * abs(fd2) + 1e-12:
                raise ManifoldError(f"f' does not vanish at the pole: f'({r0:g})={fd1:.3e}")

    @property
    def kinds(self) -> dict[str, int]:
        """Frame direction kinds with their multiplicities."""
        if self.kind == "kw":
            return {"t": 1, "r": 1, "a": self.m - 2}
        return {"r": 1, "a": self.m - 1}


def manifold_from_spec(spec: ManifoldSpecDTO | dict) -> ModelManifold:
    """Build a ModelManifold from a parsed spec."""
    if isinstance(spec, dict):
        spec = ManifoldSpecDTO.model_validate(spec)
    eta = warp_from_spec(spec.eta.model_dump())
    f = warp_from_spec(spec.f.model_dump()) if spec.f is not None else None
    return ModelManifold(kind=spec.kind, m=spec.m, eta=eta, f=f, pole=spec.pole, fiber=spec.fiber)


@dataclass
class SectionalSpectrum:
    """Sectional curvatures of the simple coordinate planes at radii r.

    For rotationally symmetric manifolds ``K_tr`` and ``K_ta`` are None.
    """

    r: np.ndarray
    K_ra: np.ndarray
    K_aa: np.ndarray
    K_tr: np.ndarray | None = None
    K_ta: np.ndarray | None = None

    def by_class(self) -> dict[str, np.ndarray]:
        """Plane class label to curvature array."""
        out = {"ra": self.K_ra, "aa": self.K_aa}
        if self.K_tr is not None:
            out["tr"] = self.K_tr
            out["ta"] = self.K_ta
        return out

    def max_abs(self) -> np.ndarray:
        """Pointwise sup over simple planes of |Sec|."""
        return np.max(np.abs(np.vstack(list(self.by_class().values()))), axis=0)


def _radii(r: np.ndarray | float) -> np.ndarray:
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0):
        raise PoleError(f"curvature formulas need r > 0, got min r = {r.min():g}")
    return r


def _spectrum_from(r: np.ndarray, eta: tuple, f: tuple | None) -> SectionalSpectrum:
    e, e1, e2 = eta
    spec = SectionalSpectrum(r=r, K_ra=-e2 / e, K_aa=(1.0 - e1**2) / e**2)
    if f is not None:
        fv, f1, f2 = f
        spec.K_tr = -f2 / fv
        spec.K_ta = -e1 * f1 / (e * fv)
    return spec


def simple_plane_sectionals(man: ModelManifold, r: np.ndarray | float) -> SectionalSpectrum:
    """Sectional curvatures of the coordinate planes.

    Raises:
        PoleError: If some r <= 0.
    """
    r = _radii(r)
    return _spectrum_from(r, man.eta(r), man.f(r) if man.f is not None else None)


def sectionals_by_differences(man: ModelManifold, r: np.ndarray | float, step: float = 1e-4) -> SectionalSpectrum:
    """The same spectrum with warp derivatives replaced by central differences."""
    r = _radii(r)

    def fd(w: WarpFunction) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        vm, v, vp = w.value(r - step), w.value(r), w.value(r + step)
        return v, (vp - vm) / (2 * step), (vp - 2 * v + vm) / step**2

    return _spectrum_from(r, fd(man.eta), fd(man.f) if man.f is not None else None)


def _sec(spec: SectionalSpectrum, x: str, y: str) -> np.ndarray:
    return spec.by_class()[PLANE_OF[frozenset({x, y})]]


@dataclass
class RicciDiagonal:
    """Diagonal Ricci entries by frame kind.

    ``printed`` holds the entries with (m-3) multiplicities on the t and r rows
    for the doubly-warped family, for side-by-side comparison.
    """

    r: np.ndarray
    entries: dict[str, np.ndarray]
    printed: dict[str, np.ndarray] = field(default_factory=dict)

    def minimum(self) -> np.ndarray:
        """Pointwise minimum over the frame."""
        return np.min(np.vstack(list(self.entries.values())), axis=0)


def ricci_diag(man: ModelManifold, r: np.ndarray | float) -> RicciDiagonal:
    """Ricci diagonal as traces of the sectional spectrum over the frame.

    Raises:
        PoleError: If some r <= 0.
    """
    spec = simple_plane_sectionals(man, r)
    kinds = man.kinds
    entries = {}
    for x in kinds:
        total = np.zeros_like(spec.r)
        for y, count in kinds.items():
            others = count - (1 if y == x else 0)
            if others:
                total = total + others * _sec(spec, x, y)
        entries[x] = total
    printed = {}
    if man.kind == "kw":
        printed = {
            "t": spec.K_tr + (man.m - 3) * spec.K_ta,
            "r": spec.K_tr + (man.m - 3) * spec.K_ra,
            "a": entries["a"],
        }
    return RicciDiagonal(r=spec.r, entries=entries, printed=printed)


def ricci_trace_consistency(man: ModelManifold, r: np.ndarray | float) -> float:
    """Max deviation between the frame sum of Ricci and the double plane sum."""
    spec = simple_plane_sectionals(man, r)
    diag = ricci_diag(man, r)
    kinds = man.kinds
    frame_sum = sum(kinds[x] * diag.entries[x] for x in kinds)
    directions = [x for x, count in kinds.items() for _ in range(count)]
    double = np.zeros_like(spec.r)
    for i, j in itertools.permutations(range(len(directions)), 2):
        double = double + _sec(spec, directions[i], directions[j])
    return float(np.max(np.abs(frame_sum - double)))


@dataclass
class RicciLResult:
    """Coordinate-subset l-th Ricci lower bound.

    ``value`` is the normalized minimum over frame directions and their
    l-subsets of coordinate planes. ``by_direction`` keeps the minimum per
    direction. ``plane_terms`` are the bracket sums over plane-class multisets
    with at most one t-r plane (for l = 2 on the doubly-warped family these are
    the nine brackets), not normalized.
    """

    r: np.ndarray
    ell: int
    value: np.ndarray
    by_direction: dict[str, np.ndarray]
    plane_terms: dict[str, np.ndarray]

    def term_minima(self) -> dict[str, float]:
        """Grid minimum of every plane term."""
        return {k: float(np.min(v)) for k, v in self.plane_terms.items()}


def _compositions(ell: int, bounds: dict[str, int]) -> list[dict[str, int]]:
    names = list(bounds)
    out = []
    for counts in itertools.product(*(range(min(bounds[n], ell) + 1) for n in names)):
        if sum(counts) == ell:
            out.append(dict(zip(names, counts, strict=True)))
    return out


def ricci_l_lower(
    man: ModelManifold, r: np.ndarray | float, ell: int, direction: str | None = None
) -> RicciLResult:
    """Lower bound for Ric^(l) over coordinate frame directions.

    Args:
        man: Manifold.
        r: Radii, all > 0.
        ell: 1 <= ell <= m - 1.
        direction: Restrict to one frame kind ("t", "r" or "a").

    Raises:
        ArgumentError: If ell or direction is out of range.
        PoleError: If some r <= 0.
    """
    if not 1 <= ell <= man.m - 1:
        raise ArgumentError(f"ell must satisfy 1 <= ell <= m-1 = {man.m - 1}, got {ell}")
    kinds = man.kinds
    if direction is not None and direction not in kinds:
        raise ArgumentError(f"direction must be one of {sorted(kinds)}, got {direction!r}")
    spec = simple_plane_sectionals(man, r)
    by_direction = {}
    for x in [direction] if direction else list(kinds):
        bounds = {y: count - (1 if y == x else 0) for y, count in kinds.items()}
        best = None
        for combo in _compositions(ell, bounds):
            total = sum(n * _sec(spec, x, y) for y, n in combo.items() if n)
            best = total if best is None else np.minimum(best, total)
        by_direction[x] = best / ell
    value = np.min(np.vstack(list(by_direction.values())), axis=0)

    classes = list(spec.by_class())
    plane_terms = {}
    for multiset in itertools.combinations_with_replacement(sorted(classes), ell):
        if multiset.count("tr") > 1:
            continue
        plane_terms["+".join(multiset)] = sum(spec.by_class()[c] for c in multiset)
    return RicciLResult(r=spec.r, ell=ell, value=value, by_direction=by_direction, plane_terms=plane_terms)


def sphere_area(m: int) -> float:
    """Area of the unit (m-1)-sphere, 2 pi^(m/2) / Gamma(m/2)."""
    return float(2 * np.pi ** (m / 2) / special.gamma(m / 2))


def volume_ball(man: ModelManifold, R: float) -> float:
    """Volume of the geodesic ball of radius R about the pole.

    Raises:
        ManifoldError: For the doubly-warped family.
        ArgumentError: If R <= 0.
    """
    if man.kind != "rotsym":
        raise ManifoldError("volume_ball supports rotationally symmetric manifolds only")
    if R <= 0:
        raise ArgumentError(f"R must be positive, got {R}")
    lo = 0.0 if man.eta.contains(0.0) else man.r_min
    val, err = integrate.quad(lambda s: float(man.eta.value(s)) ** (man.m - 1), lo, R, epsabs=0.0, epsrel=1e-12, limit=200)
    logger.debug("volume_ball R=%g: %.16g (+- %.1e)", R, val, err)
    return sphere_area(man.m) * val


def bishop_gromov_ratio(man: ModelManifold, radii: np.ndarray) -> np.ndarray:
    """|B_R| / R^m for each R."""
    radii = np.asarray(radii, dtype=float)
    return np.array([volume_ball(man, R) / R**man.m for R in radii])


def ball_offset_bound(vol_x: float, d: float, R: float, m: int) -> tuple[float, float]:
    """Bracket for sqrt(|B_R(x)| |B_R(y)|) when dist(x, y) = d.

    Returns:
        (vol_x (1 + d/R)^(-m/2), vol_x (1 + d/R)^(m/2)).
    """
    if vol_x <= 0 or d < 0 or R <= 0:
        raise ArgumentError(f"need vol_x > 0, d >= 0, R > 0; got {vol_x}, {d}, {R}")
    factor = (1.0 + d / R) ** (m / 2)
    return vol_x / factor, vol_x * factor
