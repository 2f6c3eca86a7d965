"""Closed-form curvature of the space forms and the finite-difference cross-check."""

from typing import Any

import numpy as np

from min_graph.checks.base import BaseCheck, CheckOutcome
from min_graph.model_manifold import (
    ModelManifold,
    ricci_diag,
    ricci_trace_consistency,
    sectionals_by_differences,
    simple_plane_sectionals,
)
from min_graph.warp import EuclideanWarp, HyperbolicWarp, SphereWarp

SPACE_FORMS = {"sphere": (SphereWarp, 1.0), "euclidean": (EuclideanWarp, 0.0), "hyperbolic": (HyperbolicWarp, -1.0)}


class Check(BaseCheck):
    """Sectional and Ricci values of the unit sphere, Euclidean and hyperbolic space."""

    check_name = "curvature"
    anchor = "sectional curvatures of rotationally symmetric metrics"
    defaults = {"n": 600, "dims": [2, 3, 4, 5], "tol": 1e-9, "fd_tol": 1e-6, "fd_step": 1e-4}
    quick_defaults = {"n": 120, "dims": [2, 3, 4]}

    def handle(self, config: dict[str, Any]) -> CheckOutcome:
        """Compare every space form against its constant curvature."""
        s = self.resolve(config)
        r = np.linspace(0.1, 3.0, s["n"])
        outputs: dict[str, Any] = {}
        passed = True
        for name, (warp, k) in SPACE_FORMS.items():
            for m in s["dims"]:
                man = ModelManifold(kind="rotsym", m=m, eta=warp())
                spec = simple_plane_sectionals(man, r)
                sec_err = max(float(np.max(np.abs(v - k))) for v in spec.by_class().values())
                ric_err = max(float(np.max(np.abs(v - (m - 1) * k))) for v in ricci_diag(man, r).entries.values())
                fd = sectionals_by_differences(man, r, s["fd_step"])
                fd_err = max(
                    float(np.max(np.abs(fd.by_class()[c] - v))) for c, v in spec.by_class().items()
                )
                trace_err = ricci_trace_consistency(man, r)
                ok = sec_err < s["tol"] and ric_err < s["tol"] and fd_err < s["fd_tol"] and trace_err < s["tol"]
                outputs[f"{name}_m{m}"] = {
                    "sectional_error": sec_err,
                    "ricci_error": ric_err,
                    "finite_difference_error": fd_err,
                    "trace_error": trace_err,
                    "passed": ok,
                }
                passed = passed and ok
        return CheckOutcome(outputs, passed)
