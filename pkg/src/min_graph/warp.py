"""Warping functions for model metrics.

A warp is evaluated as a triple (value, first derivative, second derivative) on
numpy arrays. Closed forms cover the round sphere, flat space, hyperbolic space,
cylinders and power laws. Piecewise warps are glued with a quintic Hermite
bridge that matches value and two derivatives on both ends. The profile used by
the doubly-warped counterexample (zeta_1, zeta_2, eta and f) is built here too,
with its integrals in closed form.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from collections.abc import Mapping
from typing import Any

import numpy as np
from scipy.interpolate import BPoly

from min_graph.errors import ArgumentError, WarpConstructionError, WarpDomainError

logger = logging.getLogger(__name__)

Triple = tuple[np.ndarray, np.ndarray, np.ndarray]

POSITIVITY_SAMPLES = 10_000


class WarpFunction(ABC):
    """A positive function of the radial coordinate with two derivatives.

    Subclasses implement ``_evaluate`` on arrays already checked against the
    domain. ``left_open`` marks domains that exclude their left end point.
    """

    name: str = "warp"

    def __init__(self, lo: float = 0.0, hi: float = np.inf, left_open: bool = False) -> None:
        """Record the domain [lo, hi] (or (lo, hi] when left_open)."""
        self.lo = float(lo)
        self.hi = float(hi)
        self.left_open = left_open

    @property
    def domain(self) -> tuple[float, float]:
        """Return the domain end points."""
        return self.lo, self.hi

    def contains(self, r: np.ndarray | float) -> np.ndarray:
        """Return a boolean mask of the points inside the domain."""
        r = np.asarray(r, dtype=float)
        left = r > self.lo if self.left_open else r >= self.lo
        return left & (r <= self.hi)

    def __call__(self, r: np.ndarray | float) -> Triple:
        """Evaluate (value, d1, d2), raising WarpDomainError outside the domain."""
        arr = np.asarray(r, dtype=float)
        inside = self.contains(arr)
        if not np.all(inside):
            bad = arr[~inside].ravel()[0] if arr.ndim else float(arr)
            raise WarpDomainError(f"{self.name}: r={bad!r} outside domain {self.describe_domain()}")
        flat = np.atleast_1d(arr)
        v, d1, d2 = self._evaluate(flat)
        shape = arr.shape
        return tuple(np.broadcast_to(x, flat.shape).astype(float).reshape(shape) for x in (v, d1, d2))

    def value(self, r: np.ndarray | float) -> np.ndarray:
        """Return the value only."""
        return self(r)[0]

    def describe_domain(self) -> str:
        """Human readable domain."""
        left = "(" if self.left_open else "["
        return f"{left}{self.lo:g}, {self.hi:g}]"

    @abstractmethod
    def _evaluate(self, r: np.ndarray) -> Triple:
        """Evaluate on in-domain points."""


def warp_eval(w: WarpFunction, r: np.ndarray | float) -> Triple:
    """Evaluate a warp as (value, d1, d2); outside the domain raises WarpDomainError."""
    return w(r)


def derivative_consistency(w: WarpFunction, r: np.ndarray, step: float = 1e-4) -> tuple[float, float]:
    """Compare reported derivatives with central differences of the value.

    Returns:
        Maximum absolute deviation of d1 and of d2 over the interior points of r
        for which r +- step stays in the domain.
    """
    r = np.asarray(r, dtype=float)
    r = r[w.contains(r - step) & w.contains(r + step)]
    if r.size == 0:
        raise ArgumentError("no sample leaves room for a central difference")
    vm, vp = w.value(r - step), w.value(r + step)
    v, d1, d2 = w(r)
    fd1 = (vp - vm) / (2 * step)
    fd2 = (vp - 2 * v + vm) / step**2
    return float(np.max(np.abs(fd1 - d1))), float(np.max(np.abs(fd2 - d2)))


class EuclideanWarp(WarpFunction):
    """eta(r) = r."""

    name = "euclidean"

    def _evaluate(self, r: np.ndarray) -> Triple:
        return r, np.ones_like(r), np.zeros_like(r)


class SphereWarp(WarpFunction):
    """eta(r) = sin(k r)/k, the sphere of curvature k^2."""

    name = "sphere"

    def __init__(self, k: float = 1.0) -> None:
        """Build the warp on [0, pi/k]."""
        if k <= 0:
            raise ArgumentError(f"sphere curvature scale must be positive, got {k}")
        super().__init__(0.0, np.pi / k)
        self.k = k

    def _evaluate(self, r: np.ndarray) -> Triple:
        k = self.k
        return np.sin(k * r) / k, np.cos(k * r), -k * np.sin(k * r)


class HyperbolicWarp(WarpFunction):
    """eta(r) = sinh(k r)/k, hyperbolic space of curvature -k^2."""

    name = "hyperbolic"

    def __init__(self, k: float = 1.0) -> None:
        """Build the warp on [0, inf)."""
        if k <= 0:
            raise ArgumentError(f"hyperbolic curvature scale must be positive, got {k}")
        super().__init__()
        self.k = k

    def _evaluate(self, r: np.ndarray) -> Triple:
        k = self.k
        return np.sinh(k * r) / k, np.cosh(k * r), k * np.sinh(k * r)


class ConstantWarp(WarpFunction):
    """A constant warp (cylinder ends, flat t-direction)."""

    name = "constant"

    def __init__(self, value: float = 1.0) -> None:
        """Build the constant warp; value must be positive."""
        if value <= 0:
            raise ArgumentError(f"constant warp must be positive, got {value}")
        super().__init__()
        self.c = float(value)

    def _evaluate(self, r: np.ndarray) -> Triple:
        return np.full_like(r, self.c), np.zeros_like(r), np.zeros_like(r)


class PowerWarp(WarpFunction):
    """coef * r**power on (0, inf)."""

    name = "power"

    def __init__(self, coef: float = 1.0, power: float = 1.0) -> None:
        """Build the power warp."""
        if coef <= 0:
            raise ArgumentError(f"power warp coefficient must be positive, got {coef}")
        super().__init__(0.0, np.inf, left_open=True)
        self.coef = coef
        self.power = power

    def _evaluate(self, r: np.ndarray) -> Triple:
        c, p = self.coef, self.power
        return c * r**p, c * p * r ** (p - 1), c * p * (p - 1) * r ** (p - 2)


class PiecewiseWarp(WarpFunction):
    """``left`` up to ``a``, a quintic Hermite bridge on [a, b], ``right`` from ``b``.

    The bridge matches (value, d1, d2) of the neighbours at both ends so the
    glued warp is C^2. Positivity of the bridge is checked on a fine grid.
    """

    name = "custom-piecewise"

    def __init__(self, left: WarpFunction, right: WarpFunction, bridge: tuple[float, float]) -> None:
        """Glue left and right across the bridge interval."""
        a, b = map(float, bridge)
        if not a < b:
            raise WarpConstructionError(f"bridge interval must satisfy a < b, got [{a}, {b}]")
        if not (left.contains(a) and right.contains(b)):
            raise WarpConstructionError("bridge end points must lie in the neighbouring domains")
        super().__init__(left.lo, right.hi, left_open=left.left_open)
        self.left, self.right, self.a, self.b = left, right, a, b
        ya = [float(x) for x in left(a)]
        yb = [float(x) for x in right(b)]
        self.bridge = hermite_bridge(a, b, ya, yb)
        self._d1 = self.bridge.derivative(1)
        self._d2 = self.bridge.derivative(2)
        check_positive(self.bridge, a, b, f"{self.name} bridge")

    def _evaluate(self, r: np.ndarray) -> Triple:
        out = [np.empty_like(r) for _ in range(3)]
        lo, mid, hi = r < self.a, (r >= self.a) & (r <= self.b), r > self.b
        for mask, fn in ((lo, self.left), (hi, self.right)):
            if np.any(mask):
                for dst, src in zip(out, fn(r[mask]), strict=True):
                    dst[mask] = src
        if np.any(mid):
            x = r[mid]
            out[0][mid], out[1][mid], out[2][mid] = self.bridge(x), self._d1(x), self._d2(x)
        return out[0], out[1], out[2]


def hermite_bridge(a: float, b: float, ya: list[float], yb: list[float]) -> BPoly:
    """Quintic Bernstein polynomial matching (value, d1, d2) at a and b."""
    return BPoly.from_derivatives([a, b], [list(ya[:3]), list(yb[:3])])


def check_positive(poly: BPoly, a: float, b: float, label: str) -> None:
    """Raise WarpConstructionError if poly is not positive on POSITIVITY_SAMPLES points of [a, b]."""
    x = np.linspace(a, b, POSITIVITY_SAMPLES)
    worst = float(np.min(poly(x)))
    if worst <= 0:
        raise WarpConstructionError(f"{label} loses positivity (min {worst:.3e} at t={x[np.argmin(poly(x))]:.6g})")


class KWProfile:
    """The radial profile functions zeta_1 and zeta_2 of the doubly-warped example.

    zeta_1(t) = t on [0, 1], t^(-1-alpha) on [2, inf) and a quintic Hermite bridge
    in between. zeta_2(t) is the tail integral of zeta_1 from t to infinity and
    ``zeta2_integral`` is its antiderivative from 0. All pieces are exact
    polynomial or power-law integrals.
    """

    def __init__(self, alpha: float) -> None:
        """Build the profile for 0 < alpha < 1."""
        if not 0 < alpha < 1:
            raise ArgumentError(f"alpha must lie in (0, 1), got {alpha}")
        self.alpha = a = float(alpha)
        ya = [1.0, 1.0, 0.0]
        yb = [2 ** (-1 - a), -(1 + a) * 2 ** (-2 - a), (1 + a) * (2 + a) * 2 ** (-3 - a)]
        self.bridge = hermite_bridge(1.0, 2.0, ya, yb)
        check_positive(self.bridge, 1.0, 2.0, "zeta_1 smoothing")
        self._b1 = self.bridge.derivative(1)
        self._anti1 = self.bridge.antiderivative(1)
        self._anti2 = self.bridge.antiderivative(2)
        self.tail2 = 2 ** (-a) / a
        self.zeta2_at1 = self.tail2 + float(self._anti1(2.0) - self._anti1(1.0))
        self.zeta2_at0 = self.zeta2_at1 + 0.5
        self._int_at1 = self.zeta2_at0 - 1.0 / 6.0
        self._int_at2 = self._int_at1 + float(self._bridge_integral(2.0))
        logger.debug("zeta_2(0)=%.12g for alpha=%g", self.zeta2_at0, a)

    def _bridge_integral(self, r: np.ndarray | float) -> np.ndarray:
        # int_1^r (A(2) + tail2 - A(s)) ds with A the bridge antiderivative
        r = np.asarray(r, dtype=float)
        const = float(self._anti1(2.0)) + self.tail2
        return const * (r - 1.0) - (self._anti2(r) - float(self._anti2(1.0)))

    def zeta1(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return zeta_1 and its derivative."""
        shape = np.shape(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        a = self.alpha
        v, d = np.empty_like(t), np.empty_like(t)
        lo, mid, hi = t <= 1.0, (t > 1.0) & (t < 2.0), t >= 2.0
        v[lo], d[lo] = t[lo], 1.0
        v[mid], d[mid] = self.bridge(t[mid]), self._b1(t[mid])
        v[hi], d[hi] = t[hi] ** (-1 - a), -(1 + a) * t[hi] ** (-2 - a)
        return v.reshape(shape), d.reshape(shape)

    def zeta2(self, t: np.ndarray) -> np.ndarray:
        """Return zeta_2(t), the integral of zeta_1 over [t, inf)."""
        shape = np.shape(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        a = self.alpha
        out = np.empty_like(t)
        lo, mid, hi = t <= 1.0, (t > 1.0) & (t < 2.0), t >= 2.0
        out[lo] = (1.0 - t[lo] ** 2) / 2 + self.zeta2_at1
        out[mid] = float(self._anti1(2.0)) - self._anti1(t[mid]) + self.tail2
        out[hi] = t[hi] ** (-a) / a
        return out.reshape(shape)

    def zeta2_integral(self, r: np.ndarray) -> np.ndarray:
        """Return the integral of zeta_2 over [0, r]."""
        shape = np.shape(r)
        r = np.atleast_1d(np.asarray(r, dtype=float))
        a = self.alpha
        out = np.empty_like(r)
        lo, mid, hi = r <= 1.0, (r > 1.0) & (r < 2.0), r >= 2.0
        out[lo] = self.zeta2_at0 * r[lo] - r[lo] ** 3 / 6
        out[mid] = self._int_at1 + self._bridge_integral(r[mid])
        out[hi] = self._int_at2 + (r[hi] ** (1 - a) - 2 ** (1 - a)) / (a * (1 - a))
        return out.reshape(shape)


class KWEtaWarp(WarpFunction):
    """eta(r) = r/2 + (1/(2 zeta_2(0))) * integral_0^r zeta_2."""

    name = "kw-eta"

    def __init__(self, alpha: float) -> None:
        """Build eta from the zeta profile."""
        super().__init__()
        self.profile = KWProfile(alpha)

    def _evaluate(self, r: np.ndarray) -> Triple:
        p = self.profile
        scale = 1.0 / (2.0 * p.zeta2_at0)
        v = r / 2 + scale * p.zeta2_integral(r)
        d1 = 0.5 + scale * p.zeta2(r)
        d2 = -scale * p.zeta1(r)[0]
        return v, d1, d2


class KWFWarp(WarpFunction):
    """f(r) = (b + r^2)^p + c."""

    name = "kw-f"

    def __init__(self, b: float, c: float, p: float) -> None:
        """Build f; b and c must be positive."""
        if b <= 0 or c <= 0:
            raise ArgumentError(f"kw-f needs b > 0 and c > 0, got b={b}, c={c}")
        super().__init__()
        self.b, self.c, self.p = float(b), float(c), float(p)

    def _evaluate(self, r: np.ndarray) -> Triple:
        b, c, p = self.b, self.c, self.p
        s = b + r**2
        v = s**p + c
        d1 = 2 * p * r * s ** (p - 1)
        d2 = 2 * p * s ** (p - 1) + 4 * p * (p - 1) * r**2 * s ** (p - 2)
        return v, d1, d2


def warp_from_spec(spec: Mapping[str, Any]) -> WarpFunction:
    """Build a warp from a parsed JSON spec ``{"name": ..., "params": {...}}``.

    ``custom-piecewise`` additionally carries ``left``, ``right`` and ``bridge``.
    """
    name = spec.get("name")
    params = dict(spec.get("params") or {})
    match name:
        case "euclidean":
            return EuclideanWarp()
        case "sphere":
            return SphereWarp(**params)
        case "hyperbolic":
            return HyperbolicWarp(**params)
        case "constant":
            return ConstantWarp(**params)
        case "power":
            return PowerWarp(**params)
        case "kw-eta":
            return KWEtaWarp(**params)
        case "kw-f":
            if "p" not in params:
                m, beta = params.pop("m"), params.pop("beta")
                params["p"] = (beta + 3 - m) / 2
            return KWFWarp(**params)
        case "custom-piecewise":
            left, right, bridge = spec.get("left"), spec.get("right"), spec.get("bridge")
            if left is None or right is None or bridge is None:
                raise WarpConstructionError("custom-piecewise needs left, right and bridge")
            return PiecewiseWarp(warp_from_spec(left), warp_from_spec(right), tuple(bridge))
        case _:
            raise ArgumentError(f"unknown warp {name!r}")
