"""Parameter constraints, sampled verification and the entire-solution limit."""

import itertools
import math
from typing import Any

import numpy as np

from min_graph.checks.base import BaseCheck, CheckOutcome
from min_graph.counterexample import build_kw_manifold, search_bc
from min_graph.gradient_bound import (
    BoundInputs,
    canonical_params,
    entire_bound,
    entire_bound_limit,
    optimize_params,
    validate_params,
    verify_solution_bound,
)
from min_graph.model_manifold import ModelManifold
from min_graph.mse import TGraph, radial_flux_solution
from min_graph.warp import EuclideanWarp


def canonical_grid(deltas: list[float], gammas: list[float], m: int = 3, R: float = 10.0, R1: float = 1.0) -> dict[str, Any]:  # noqa: N803
    """Constraint slacks and the two identities over a (delta, gamma*) grid."""
    out = {}
    for delta, g in itertools.product(deltas, gammas):
        inp = BoundInputs(m=m, kbar=1.0, R=R, R1=R1, gamma_star=g)
        p = canonical_params(delta, g, m, inp.kbar0, R)
        report = validate_params(inp, p)
        a2, a3 = p.a2(inp), p.a3(inp)
        out[f"delta={delta},gamma*={g}"] = {
            "valid": report.passed,
            "slack": report.as_dict()["slack"],
            "a3_2a2_rel": abs(a3 - 2 * a2) / abs(a3),
            "a0_identity_rel": abs(p.a0**2 * g**2 - 32 * g**2 / (1 - delta) ** 2) / (32 * g**2 / (1 - delta) ** 2),
        }
    return out


class Check(BaseCheck):
    """Gradient estimate on the catenoid family and the doubly-warped t-graph."""

    check_name = "gradient_estimate"
    anchor = "interior gradient estimate under Ricci lower bounds"
    defaults = {
        "deltas": [0.5, 0.7, 0.9],
        "gammas": [0.1, 1.0, 10.0],
        "identity_tol": 1e-12,
        "catenoid_radii": [1.0, 2.0, 3.0],
        "graph_n": 2049,
        "samples": 41,
        "search_grid": 7,
        "search_n": 1024,
        "cert_n": 8192,
        "limit_tol": 1e-6,
        "seed": 0,
    }
    quick_defaults = {"graph_n": 513, "samples": 21, "search_n": 512, "cert_n": 2048}

    def handle(self, config: dict[str, Any]) -> CheckOutcome:
        """All four parts; each contributes to the verdict."""
        s = self.resolve(config)
        grid = canonical_grid(s["deltas"], s["gammas"])
        grid_ok = all(
            v["valid"] and v["a3_2a2_rel"] < s["identity_tol"] and v["a0_identity_rel"] < s["identity_tol"]
            for v in grid.values()
        )

        plane = ModelManifold(kind="rotsym", m=2, eta=EuclideanWarp())
        catenoid = radial_flux_solution(plane, 1.0, 1.5, 9.5, s["graph_n"])
        family = {}
        for R in s["catenoid_radii"]:
            inp = BoundInputs(m=2, R=R, R1=R / 2, gamma_star=1.0)
            family[f"R={R}"] = verify_solution_bound(catenoid, inp, n_samples=s["samples"])

        search = search_bc(4, 0.4, 0.4, grid=s["search_grid"], n_search=s["search_n"], n=s["cert_n"])
        cert = search.certificate
        kw = build_kw_manifold(cert.spec)
        t_inp = BoundInputs(m=4, kbar=cert.kbar_decay, R=10.0, R1=5.0, gamma_star=1.0)
        tgraph = verify_solution_bound(TGraph(kw, 1.0), t_inp, certificate=cert, n_samples=s["samples"])

        radii = np.geomspace(1e2, 1e12, 11)
        limit = entire_bound_limit(0.1, 3, 1.0, radii)
        entire = entire_bound(0.1, 3, 1.0).log_value
        limit_err = abs(float(limit[-1]) - entire)

        opt_inp = BoundInputs(m=3, kbar=1.0, R=10.0, R1=1.0, gamma_star=1.0)
        optimized = {}
        for r, g in [(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]:
            res = optimize_params(opt_inp, r, g, seed=s["seed"])
            optimized[f"r={r},gamma={g}"] = {
                "log_bound": res.bound.log_value,
                "canonical_log_bound": res.canonical_bound.log_value if res.canonical_bound else None,
                "not_worse": res.canonical_bound is None or res.bound <= res.canonical_bound,
            }

        passed = (
            grid_ok
            and all(v["passed"] for v in family.values())
            and tgraph["passed"]
            and limit_err < s["limit_tol"]
            and all(v["not_worse"] for v in optimized.values())
        )
        return CheckOutcome(
            {
                "canonical_grid": grid,
                "catenoid_family": family,
                "t_graph": {**tgraph, "b": search.b, "c": search.c, "kbar_decay": cert.kbar_decay},
                "entire_limit": {"log_limit": float(limit[-1]), "log_entire": entire, "abs_log_error": limit_err},
                "optimized": optimized,
                "entire_bound_finite": math.isfinite(entire),
            },
            passed,
        )
