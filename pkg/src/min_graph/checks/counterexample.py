"""Certificate of the doubly-warped construction at the searched (b, c)."""

from typing import Any

from min_graph.checks.base import BaseCheck, CheckOutcome
from min_graph.counterexample import certify, search_bc

ASSERTED = ("eta_prime_range", "f_bounds", "ricci_positive", "t_graph_minimal", "bounded_gradient", "decay_kbar")


class Check(BaseCheck):
    """m = 4, alpha = beta = 0.4 on [0, 200]."""

    check_name = "counterexample"
    anchor = "non-constant minimal graph of bounded gradient on a manifold with Ric > 0"
    defaults = {"m": 4, "alpha": 0.4, "beta": 0.4, "grid": 7, "r_max": 200.0, "search_n": 1024, "n": 8192}
    quick_defaults = {"search_n": 512, "n": 2048}

    def handle(self, config: dict[str, Any]) -> CheckOutcome:
        """Search, certify, then re-certify with b doubled."""
        s = self.resolve(config)
        result = search_bc(s["m"], s["alpha"], s["beta"], grid=s["grid"], r_max=s["r_max"], n_search=s["search_n"], n=s["n"])
        cert = result.certificate
        doubled = certify(cert.spec.model_copy(update={"b": 2 * cert.spec.b}), r_max=s["r_max"], n=s["n"])
        statuses = {c.name: c.status for c in cert.claims}
        stable = doubled.claim("ricci_positive").status == "pass"
        passed = all(statuses[name] == "pass" for name in ASSERTED) and stable
        return CheckOutcome(
            {
                "b": result.b,
                "c": result.c,
                "search_margin": result.margin,
                "certificate": cert.model_dump(),
                "doubled_b_ricci_positive": stable,
            },
            passed,
        )
