"""Lower Gaussian constants from the upper ones."""

import math
from typing import Any

from min_graph.checks.base import BaseCheck, CheckOutcome
from min_graph.heat import appendix_constants
from min_graph.report_model_dto import to_jsonable


class Check(BaseCheck):
    """Bisected c0 against the m = 2 closed form, and the range of gamma and C1'."""

    check_name = "appendix_constants"
    anchor = "lower Gaussian bound from the upper bound and a Harnack constant"
    defaults = {"C3p": 1.0, "C4p": 0.25, "C_harnack": 1.0, "target": 0.75, "tol": 1e-8, "dims": [2, 3, 4]}

    def handle(self, config: dict[str, Any]) -> CheckOutcome:
        """Solve for every dimension; m = 2 is compared with the closed form."""
        s = self.resolve(config)
        outputs: dict[str, Any] = {}
        passed = True
        for m in s["dims"]:
            res = appendix_constants(s["C3p"], s["C4p"], m, s["C_harnack"], target=s["target"])
            ok = 0.5 < res.gamma < 1 and 0 < res.C1p < 1 - res.gamma
            entry = to_jsonable(res)
            if m == 2:
                closed = math.log(s["C3p"] / (s["C4p"] * s["target"])) / s["C4p"]
                entry["closed_form_c0"] = closed
                entry["c0_error"] = abs(res.c0 - closed)
                ok = ok and res.bracketed and entry["c0_error"] < s["tol"]
            entry["passed"] = ok
            outputs[f"m={m}"] = entry
            passed = passed and ok
        return CheckOutcome(outputs, passed)
