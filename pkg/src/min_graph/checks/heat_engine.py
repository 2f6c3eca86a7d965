"""Heat kernel accuracy, mass ledger, supersolution flows and mean-value limits."""

from typing import Any

import numpy as np

from min_graph.checks.base import BaseCheck, CheckOutcome
from min_graph.counterexample import KWSpec, build_kw_manifold
from min_graph.heat import (
    EllipticCoefficient,
    RadialMesh,
    ball_average_limit,
    build_graph_operator,
    discrete_fundamental_solution,
    euclidean_kernel,
    evolve_kernel,
    gaussian_sandwich_check,
    lhopital_liminf,
    mass_conservation_check,
    samples_from_run,
    spherical_mean_pairs,
    supersolution_flow,
    time_derivative_check,
    weighted_laplacian_average,
)
from min_graph.model_manifold import ModelManifold
from min_graph.mse import TGraph, radial_flux_solution
from min_graph.report_model_dto import to_jsonable
from min_graph.warp import EuclideanWarp

SAMPLE_TIMES = [0.25, 0.5, 1.0]


def kernel_part(s: dict[str, Any]) -> tuple[dict[str, Any], bool]:
    """Euclidean m = 3 kernel against the Gaussian, the mass ledger and the sandwich fits."""
    man = ModelManifold(kind="rotsym", m=3, eta=EuclideanWarp())
    mesh = RadialMesh.ball(man, s["kernel_r_max"], s["kernel_n"])
    out: dict[str, Any] = {}
    passed = True
    for label, op in (("identity", EllipticCoefficient.identity()), ("perturbed", EllipticCoefficient.perturbed())):
        run = evolve_kernel(mesh, op, SAMPLE_TIMES)
        mass = mass_conservation_check(run, s["mass_tol"])
        samples = samples_from_run(run, 3.0)
        sandwich = gaussian_sandwich_check(samples)
        deriv = time_derivative_check(samples_from_run(run, 3.0, derivative=True))
        part = {"mass": to_jsonable(mass), "sandwich_fit": sandwich.fitted, "sandwich_passed": sandwich.passed, "time_derivative": deriv}
        ok = mass.passed and sandwich.passed and deriv["passed"]
        if label == "identity":
            near = mesh.centers <= 3.0
            exact = euclidean_kernel(3, mesh.centers[near], 1.0)
            rel = float(np.max(np.abs(run.snapshots[-1][near] - exact) / exact))
            part["gaussian_relative_error"] = rel
            ok = ok and rel < s["kernel_rtol"]
        part["passed"] = ok
        out[label] = part
        passed = passed and ok
    return out, passed


def flow_part(s: dict[str, Any]) -> tuple[dict[str, Any], dict[str, Any], bool]:
    """Supersolution flows and weighted Laplacian averages of the shipped supersolutions."""
    man = ModelManifold(kind="rotsym", m=3, eta=EuclideanWarp())
    ball = RadialMesh.ball(man, s["flow_r_max"], s["flow_n"])
    flows, averages = {}, {}
    radii = np.geomspace(0.5, 0.9 * s["flow_r_max"], 12)
    for label, op in (("identity", EllipticCoefficient.identity()), ("perturbed", EllipticCoefficient.perturbed())):
        f = np.minimum(1.0, discrete_fundamental_solution(ball, op))
        flows[f"fundamental_{label}"] = to_jsonable(supersolution_flow(f, op, ball, s["flow_T"]))
        averages[f"fundamental_{label}"] = _average(weighted_laplacian_average(f, op, ball, radii))
    ident = EllipticCoefficient.identity()
    for label, f in (("constant", np.ones_like(ball.centers)), ("inverse_sqrt", (1.0 + ball.centers**2) ** -0.5)):
        averages[label] = _average(weighted_laplacian_average(f, ident, ball, radii))
    flows["inverse_sqrt"] = to_jsonable(supersolution_flow((1.0 + ball.centers**2) ** -0.5, ident, ball, s["flow_T"]))

    plane = ModelManifold(kind="rotsym", m=2, eta=EuclideanWarp())
    catenoid = radial_flux_solution(plane, 1.0, 1.5, 9.5, 4 * s["flow_n"] + 1)
    annulus = RadialMesh.annulus(plane, 1.5, 9.5, s["flow_n"])
    inv_w = np.sqrt(annulus.centers**2 - 1.0) / annulus.centers
    flows["catenoid_inverse_w"] = to_jsonable(supersolution_flow(inv_w, build_graph_operator(catenoid), annulus, s["flow_T"]))
    passed = all(v["passed"] for v in flows.values()) and all(v["passed"] for v in averages.values())
    return flows, averages, passed


def _average(report: Any) -> dict[str, Any]:
    return {
        "values": report.averages.tolist(),
        "radii": report.radii.tolist(),
        "passed": report.passed,
    }


def mean_value_part(s: dict[str, Any]) -> tuple[dict[str, Any], bool]:
    """Ball averages tending to the infimum and the liminf comparisons."""
    man = ModelManifold(kind="rotsym", m=3, eta=EuclideanWarp())
    out: dict[str, Any] = {}

    def decaying(r: np.ndarray) -> np.ndarray:
        return 2.0 + 1.0 / (1.0 + np.asarray(r, dtype=float))

    avg = ball_average_limit(decaying, man, [1.0, 10.0, 100.0], infimum=2.0)
    out["ball_average"] = {"values": avg.averages.tolist(), "passed": avg.passed}

    kw = build_kw_manifold(KWSpec(b=1e3, c=1e3))
    tg = TGraph(kw, 1.0)
    sup_w2 = 1.0 + 1.0 / kw.f.c**2
    kw_avg = ball_average_limit(lambda r: -(tg.W(r) ** 2), kw, [10.0, 100.0, 1000.0], infimum=-sup_w2)
    out["kw_minus_w_squared"] = {"values": kw_avg.averages.tolist(), "target": -sup_w2, "passed": kw_avg.passed}

    t = np.linspace(0.0, 60.0, 6001)
    periodic = lhopital_liminf(2.0 + np.sin(t), np.ones_like(t), t)
    grid = np.linspace(0.01, 100.0, 10000)
    h, g = spherical_mean_pairs(decaying, man, grid)
    spherical = lhopital_liminf(h, g, grid)
    out["lhopital"] = {"periodic": to_jsonable(periodic), "spherical_mean": to_jsonable(spherical)}
    passed = avg.passed and kw_avg.passed and periodic.holds and spherical.holds
    return out, passed


class Check(BaseCheck):
    """Heat engine battery on Euclidean 3-space and the catenoid."""

    check_name = "heat_engine"
    anchor = "Gaussian heat kernel bounds and mean-value limits"
    defaults = {
        "kernel_n": 2048,
        "kernel_r_max": 12.0,
        "kernel_rtol": 1e-3,
        "mass_tol": 1e-8,
        "flow_n": 400,
        "flow_r_max": 50.0,
        "flow_T": 2.0,
    }
    quick_defaults = {"kernel_n": 1024, "flow_n": 200, "flow_T": 1.0}

    def handle(self, config: dict[str, Any]) -> CheckOutcome:
        """Kernel, flows and mean values."""
        s = self.resolve(config)
        kernel, k_ok = kernel_part(s)
        flows, averages, f_ok = flow_part(s)
        means, m_ok = mean_value_part(s)
        return CheckOutcome(
            {"kernel": kernel, "supersolution_flows": flows, "weighted_laplacian_averages": averages, "mean_values": means},
            k_ok and f_ok and m_ok,
        )
