"""Heat kernels, mean-value limits, weighted Laplacian averages and the lower-bound constants."""

from typing import Any

import click
import numpy as np
from icecream import ic

from min_graph.cli.common import emit_report, guarded, load_manifold
from min_graph.heat import (
    EllipticCoefficient,
    GaussianConstants,
    RadialMesh,
    appendix_constants,
    ball_average_limit,
    discrete_fundamental_solution,
    euclidean_kernel,
    evolve_kernel,
    gaussian_sandwich_check,
    lhopital_liminf,
    mass_conservation_check,
    samples_from_run,
    spherical_mean_pairs,
    time_derivative_check,
    weighted_laplacian_average,
)
from min_graph.model_manifold import ModelManifold
from min_graph.report_model_dto import to_jsonable
from min_graph.warp import EuclideanWarp

OPERATORS = {"identity": EllipticCoefficient.identity, "perturbed": EllipticCoefficient.perturbed}


def resolve_manifold(manifold: str | None, m: int) -> ModelManifold:
    """Spec file, or Euclidean space of dimension m."""
    return load_manifold(manifold) if manifold else ModelManifold(kind="rotsym", m=m, eta=EuclideanWarp())


@click.group()
def group() -> None:
    """Heat engine: kernel, meanvalue, lap-average, appendix-constants."""


@group.command(name="kernel")
@click.option("--manifold", type=str, required=False, help="Manifold spec JSON; default Euclidean of dimension --m")
@click.option("--m", type=int, default=3, show_default=True)
@click.option("--operator", type=click.Choice(sorted(OPERATORS)), default="identity", show_default=True)
@click.option("--r-max", type=float, default=12.0, show_default=True, help="Outer radius of the mesh")
@click.option("--n", type=int, default=2048, show_default=True, help="Cells")
@click.option("--t", "times", type=float, multiple=True, default=(0.25, 0.5, 1.0), show_default=True, help="Sample times")
@click.option("--d-max", type=float, default=3.0, show_default=True, help="Largest sampled distance")
@click.option("--constants", type=(float, float, float, float), default=None, help="C1 C2 C3 C4 to check")
@click.option("--mass-tol", type=float, default=1e-8, show_default=True)
@click.option("--rtol", type=float, default=1e-3, show_default=True, help="Gaussian comparison tolerance")
@click.option("--out", type=str, required=False, help="Report name or path")
@click.pass_context
def kernel_cmd(ctx: click.Context, **kw: Any) -> int:
    """Evolve a mollified delta and check mass, Gaussian bounds and d_t H."""
    man = resolve_manifold(kw["manifold"], kw["m"])
    mesh = guarded(lambda: RadialMesh.ball(man, kw["r_max"], kw["n"]))
    op = OPERATORS[kw["operator"]]()
    run = guarded(lambda: evolve_kernel(mesh, op, list(kw["times"])))
    mass = mass_conservation_check(run, kw["mass_tol"])
    constants = guarded(lambda: GaussianConstants(*kw["constants"])) if kw["constants"] else None
    samples = samples_from_run(run, kw["d_max"])
    sandwich = gaussian_sandwich_check(samples, constants)
    outputs: dict[str, Any] = {
        "mass": to_jsonable(mass),
        "sandwich": {"passed": sandwich.passed, "fitted": sandwich.fitted, "first_failure": sandwich.worst(samples)},
        "time_derivative": time_derivative_check(samples_from_run(run, kw["d_max"], derivative=True)),
    }
    passed = mass.passed and sandwich.passed and bool(outputs["time_derivative"]["passed"])
    euclidean = isinstance(man.eta, EuclideanWarp) and kw["operator"] == "identity"
    if euclidean:
        near = mesh.centers <= kw["d_max"]
        t = float(run.times[-1])
        exact = euclidean_kernel(man.m, mesh.centers[near], t)
        outputs["gaussian_relative_error"] = float(np.max(np.abs(run.snapshots[-1][near] - exact) / exact))
        passed = passed and outputs["gaussian_relative_error"] < kw["rtol"]
    ic(mass.max_drift)
    inputs = {k: kw[k] for k in ("manifold", "operator", "r_max", "n", "d_max")} | {"m": man.m, "times": list(kw["times"])}
    series = {"r": mesh.centers, "H": run.snapshots[-1]}
    return emit_report(ctx, "heat kernel", "two-sided Gaussian heat kernel bounds", inputs, outputs, passed, kw["out"], series)


@group.command(name="meanvalue")
@click.option("--manifold", type=str, required=False, help="Manifold spec JSON; default Euclidean of dimension --m")
@click.option("--m", type=int, default=3, show_default=True)
@click.option("--radii", type=float, multiple=True, default=(1.0, 10.0, 100.0), show_default=True)
@click.option("--rtol", type=float, default=0.02, show_default=True, help="Relative distance to inf f")
@click.option("--out", type=str, required=False, help="Report name or path")
@click.pass_context
def meanvalue_cmd(
    ctx: click.Context, manifold: str | None, m: int, radii: tuple[float, ...], rtol: float, out: str | None
) -> int:
    """Ball averages of f = 2 + 1/(1+r) and the spherical-mean liminf comparison."""
    man = resolve_manifold(manifold, m)

    def f(r: np.ndarray) -> np.ndarray:
        return 2.0 + 1.0 / (1.0 + np.asarray(r, dtype=float))

    avg = guarded(lambda: ball_average_limit(f, man, list(radii), infimum=2.0, rtol=rtol))
    lo = 0.0 if man.eta.contains(0.0) else man.r_min
    grid = np.linspace(lo + 0.01, max(radii), 10000)
    h, g = spherical_mean_pairs(f, man, grid)
    lh = lhopital_liminf(h, g, grid)
    outputs = {"averages": avg.averages.tolist(), "monotone_tail": avg.monotone_tail, "lhopital": to_jsonable(lh)}
    ic(avg.averages[-1])
    inputs = {"manifold": manifold, "m": man.m, "radii": list(radii), "rtol": rtol}
    return emit_report(ctx, "heat meanvalue", "mean values of superharmonic functions", inputs, outputs, avg.passed and lh.holds, out)


@group.command(name="lap-average")
@click.option("--case", type=click.Choice(["constant", "inverse-sqrt", "fundamental"]), default="fundamental", show_default=True)
@click.option("--operator", type=click.Choice(sorted(OPERATORS)), default="identity", show_default=True)
@click.option("--m", type=int, default=3, show_default=True)
@click.option("--r-max", type=float, default=50.0, show_default=True)
@click.option("--n", type=int, default=400, show_default=True)
@click.option("--out", type=str, required=False, help="Report name or path")
@click.pass_context
def lap_average_cmd(ctx: click.Context, case: str, operator: str, m: int, r_max: float, n: int, out: str | None) -> int:
    """R^2/|B_R| int_{B_R} L f for a shipped supersolution."""
    man = ModelManifold(kind="rotsym", m=m, eta=EuclideanWarp())
    mesh = guarded(lambda: RadialMesh.ball(man, r_max, n))
    op = OPERATORS[operator]()
    match case:
        case "constant":
            f = np.ones_like(mesh.centers)
        case "inverse-sqrt":
            f = (1.0 + mesh.centers**2) ** -0.5
        case _:
            f = np.minimum(1.0, discrete_fundamental_solution(mesh, op))
    radii = np.geomspace(2 * mesh.dr, 0.9 * r_max, 12)
    rep = guarded(lambda: weighted_laplacian_average(f, op, mesh, radii))
    outputs = {"radii": rep.radii.tolist(), "values": rep.averages.tolist(), "nonpositive": rep.monotone_tail}
    ic(rep.averages[-1])
    inputs = {"case": case, "operator": operator, "m": m, "r_max": r_max, "n": n}
    return emit_report(ctx, "heat lap-average", "weighted Laplacian averages of supersolutions", inputs, outputs, rep.passed, out)


@group.command(name="appendix-constants")
@click.option("--C3p", "C3p", type=float, required=True)
@click.option("--C4p", "C4p", type=float, required=True)
@click.option("--m", type=int, required=True)
@click.option("--C-harnack", "C_harnack", type=float, required=True)
@click.option("--target", type=float, default=0.75, show_default=True, help="gamma(c0) target in (1/2, 1)")
@click.option("--out", type=str, required=False, help="Report name or path")
@click.pass_context
def appendix_cmd(ctx: click.Context, C3p: float, C4p: float, m: int, C_harnack: float, target: float, out: str | None) -> int:  # noqa: N803
    """c0, gamma, c0*, C1' and C2' from the upper constants."""
    res = guarded(lambda: appendix_constants(C3p, C4p, m, C_harnack, target=target))
    outputs = to_jsonable(res)
    ic(res.c0, res.gamma)
    passed = 0.5 < res.gamma < 1 and 0 < res.C1p < 1 - res.gamma
    inputs = {"C3p": C3p, "C4p": C4p, "m": m, "C_harnack": C_harnack, "target": target}
    return emit_report(ctx, "heat appendix-constants", "lower Gaussian bound constants", inputs, outputs, passed, out)
