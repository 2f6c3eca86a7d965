"""A user-supplied check: Euclidean ball volumes against the closed form."""

import math
from typing import Any

from min_graph.checks.base import BaseCheck, CheckOutcome
from min_graph.model_manifold import ModelManifold, volume_ball
from min_graph.warp import EuclideanWarp


class Check(BaseCheck):
    check_name = "sample_check"
    anchor = "volume of Euclidean balls"
    defaults = {"m": 3, "R": 2.0, "tol": 1e-9}

    def handle(self, config: dict[str, Any]) -> CheckOutcome:
        s = self.resolve(config)
        man = ModelManifold(kind="rotsym", m=s["m"], eta=EuclideanWarp())
        m, R = s["m"], s["R"]
        exact = math.pi ** (m / 2) / math.gamma(m / 2 + 1) * R**m
        error = abs(volume_ball(man, R) - exact) / exact
        return CheckOutcome({"relative_error": error}, error < s["tol"])
