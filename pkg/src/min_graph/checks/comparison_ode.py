"""Comparison ODE against closed forms and on the shipped graphs."""

from typing import Any

import numpy as np

from min_graph.checks.base import BaseCheck, CheckOutcome
from min_graph.comparison import (
    SourceTerm,
    comparison_defect,
    power_profile,
    psi_barrier,
    solve_h,
    verify_graph_comparison,
    verify_psi_barrier,
)
from min_graph.model_manifold import ModelManifold
from min_graph.mse import radial_flux_solution
from min_graph.warp import EuclideanWarp, HyperbolicWarp


def shipped_graphs(n: int) -> list[tuple[str, ModelManifold, Any, SourceTerm]]:
    """Catenoid in R^2, a flux graph in R^3 and one in hyperbolic 3-space, with their sources."""
    plane = ModelManifold(kind="rotsym", m=2, eta=EuclideanWarp())
    space = ModelManifold(kind="rotsym", m=3, eta=EuclideanWarp())
    hyper = ModelManifold(kind="rotsym", m=3, eta=HyperbolicWarp())
    return [
        ("catenoid", plane, radial_flux_solution(plane, 1.0, 1.5, 9.5, n), SourceTerm("zero")),
        ("flux_r3", space, radial_flux_solution(space, 0.5, 1.0, 5.0, n), SourceTerm("zero")),
        ("flux_h3", hyper, radial_flux_solution(hyper, 0.5, 1.0, 4.0, n), SourceTerm("const-kappa", 1.0)),
    ]


class Check(BaseCheck):
    """solve_h against sinh, the power supersolution and the Laplacian comparison."""

    check_name = "comparison_ode"
    anchor = "Laplacian comparison for the distance on a minimal graph"
    defaults = {"n": 4096, "t_max": 5.0, "kbar": 1.0, "rtol": 1e-8, "defect_tol": 1e-10, "graph_n": 1025, "psi_a": 1.0}
    quick_defaults = {"graph_n": 257}

    def handle(self, config: dict[str, Any]) -> CheckOutcome:
        """Run the three comparisons."""
        s = self.resolve(config)
        kbar = s["kbar"]
        prof = solve_h(SourceTerm("const-kappa", kbar), s["t_max"], s["n"])
        exact = np.sinh(kbar * prof.t) / kbar
        sinh_err = float(np.max(np.abs(prof.h - exact) / exact))
        power = power_profile(kbar, np.linspace(0.01, 50.0, 5000))
        defect = float(np.min(comparison_defect(power)))
        graphs, barriers = {}, {}
        for name, man, graph, source in shipped_graphs(s["graph_n"]):
            profile = solve_h(source, 10.0, 2048)
            graphs[name] = verify_graph_comparison(man, graph, profile)
            if source.kind == "zero":
                barriers[name] = verify_psi_barrier(graph, psi_barrier(s["psi_a"], 0.0, man.m))
        passed = sinh_err < s["rtol"] and defect >= -s["defect_tol"] and all(g["passed"] for g in graphs.values())
        passed = passed and all(b["passed"] for b in barriers.values())
        return CheckOutcome(
            {
                "sinh_relative_error": sinh_err,
                "power_profile_min_defect": defect,
                "log_derivative_margin": prof.log_derivative_margin(),
                "graphs": graphs,
                "psi_barrier": barriers,
            },
            passed,
        )
