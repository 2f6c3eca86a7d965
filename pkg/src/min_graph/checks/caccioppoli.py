"""Caccioppoli inequality for divergence-form equations."""

from typing import Any

import numpy as np

from min_graph.checks.base import BaseCheck, CheckOutcome
from min_graph.model_manifold import ModelManifold
from min_graph.mse import AnnulusCutoff, RadialFunction, caccioppoli_check, radial_flux_solution
from min_graph.report_model_dto import to_jsonable
from min_graph.warp import EuclideanWarp


class Check(BaseCheck):
    """log r on a planar annulus and the catenoid height under L = W Delta_g."""

    check_name = "caccioppoli"
    anchor = "Caccioppoli inequality for uniformly elliptic divergence-form operators"
    defaults = {"n": 4097, "R": 4.0}
    quick_defaults = {"n": 1025}

    def handle(self, config: dict[str, Any]) -> CheckOutcome:
        """Both cases with cutoff phi = 1 on B_R, 0 outside B_2R."""
        s = self.resolve(config)
        R = s["R"]  # noqa: N806
        plane = ModelManifold(kind="rotsym", m=2, eta=EuclideanWarp())
        phi = AnnulusCutoff(R)
        r = np.linspace(1.0, 2 * R, s["n"])
        harmonic = caccioppoli_check(RadialFunction(plane, r, np.log(r), 1.0 / r), phi, 1.0)
        graph = radial_flux_solution(plane, 1.0, 1.5, 2 * R, s["n"])
        w = graph.W
        catenoid = caccioppoli_check(graph.as_function(), phi, float(np.max(w)), a_r=1.0 / w)
        outputs = {
            "harmonic_log": {**to_jsonable(harmonic), "margin": harmonic.margin, "holds": harmonic.holds},
            "catenoid_operator": {**to_jsonable(catenoid), "margin": catenoid.margin, "holds": catenoid.holds},
        }
        return CheckOutcome(outputs, harmonic.holds and catenoid.holds)
