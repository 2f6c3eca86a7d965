"""Catenoid accuracy, residual convergence and flux conservation."""

from typing import Any

import numpy as np

from min_graph.checks.base import BaseCheck, CheckOutcome
from min_graph.model_manifold import ModelManifold
from min_graph.mse import (
    flux_drift,
    jacobi_residual,
    mse_residual,
    radial_flux_solution,
    w_equation_residual,
)
from min_graph.warp import EuclideanWarp


def convergence_ratios(values: list[float]) -> list[float]:
    """Successive ratios e_k / e_{k+1}."""
    return [values[k] / values[k + 1] for k in range(len(values) - 1)]


class Check(BaseCheck):
    """The m = 2 catenoid over [1.5, 9.5] against arccosh."""

    check_name = "minimal_surface"
    anchor = "radial solutions of the minimal surface equation"
    defaults = {
        "n": 4096,
        "levels": [257, 513, 1025],
        "r0": 1.5,
        "r1": 9.5,
        "tol": 1e-8,
        "ratio": 4.0,
        "ratio_band": 0.25,
        "drift_tol": 1e-9,
    }
    quick_defaults = {"n": 2049}

    def handle(self, config: dict[str, Any]) -> CheckOutcome:
        """Accuracy at n, then second-order decay over the levels."""
        s = self.resolve(config)
        man = ModelManifold(kind="rotsym", m=2, eta=EuclideanWarp())
        graph = radial_flux_solution(man, 1.0, s["r0"], s["r1"], s["n"])
        exact = np.arccosh(graph.r) - np.arccosh(s["r0"])
        error = float(np.max(np.abs(graph.u - exact)))
        drift = flux_drift(graph)
        mse, jac = [], []
        for n in s["levels"]:
            g = radial_flux_solution(man, 1.0, s["r0"], s["r1"], n)
            mse.append(mse_residual(g).max)
            jac.append(jacobi_residual(g).max)
        lo, hi = s["ratio"] * (1 - s["ratio_band"]), s["ratio"] * (1 + s["ratio_band"])
        ratios = {"mse": convergence_ratios(mse), "jacobi": convergence_ratios(jac)}
        second_order = all(lo <= q <= hi for qs in ratios.values() for q in qs)
        passed = error < s["tol"] and drift < s["drift_tol"] and second_order
        return CheckOutcome(
            {
                "max_error": error,
                "flux_drift": drift,
                "mse_residuals": mse,
                "jacobi_residuals": jac,
                "ratios": ratios,
                "w_equation_residual": w_equation_residual(graph).max,
            },
            passed,
        )
