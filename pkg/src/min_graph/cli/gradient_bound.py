"""Evaluate, choose and verify parameters of the explicit gradient bound."""

import functools
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click
from icecream import ic

from min_graph.cli.common import emit_report, guarded, load_manifold, read_json, run_state
from min_graph.counterexample import Certificate, build_kw_manifold
from min_graph.gradient_bound import (
    BoundInputs,
    KorevaarParams,
    bound_exponents,
    canonical_params,
    corollary_bound,
    korevaar_bound,
    optimize_params,
    validate_params,
    verify_solution_bound,
)
from min_graph.model_manifold import ModelManifold
from min_graph.mse import RadialGraph, TGraph, radial_flux_solution
from min_graph.persist_files import PersistFiles
from min_graph.warp import EuclideanWarp

ANCHOR = "interior gradient estimate under Ricci lower bounds"


def bound_inputs(func: Callable[..., Any]) -> Callable[..., Any]:
    """Options shared by the commands that take BoundInputs."""
    options = [
        click.option("--m", type=int, required=True, help="Dimension"),
        click.option("--kappa", type=float, default=0.0, show_default=True, help="Ric >= -(m-1) kappa^2"),
        click.option("--kbar", type=float, default=0.0, show_default=True, help="Ric^(l)(grad r) >= -kbar^2/(1+r^2)"),
        click.option("--R", "R", type=float, required=True, help="Outer radius"),
        click.option("--R1", "R1", type=float, required=True, help="Inner radius"),
        click.option("--gamma-star", type=float, default=1.0, show_default=True, help="Normalized oscillation"),
    ]
    return functools.reduce(lambda f, opt: opt(f), reversed(options), func)


def make_inputs(kwargs: dict[str, Any]) -> BoundInputs:
    """BoundInputs from the shared options."""
    fields = ("m", "kappa", "kbar", "R", "R1", "gamma_star")
    return guarded(lambda: BoundInputs(**{k: kwargs[k] for k in fields}))


@click.group()
def group() -> None:
    """Gradient bound: eval, canonical, optimize, verify."""


@group.command(name="eval")
@bound_inputs
@click.option("--eps", type=float, required=True)
@click.option("--tau", type=float, required=True)
@click.option("--q", type=float, required=True)
@click.option("--a0", type=float, required=True)
@click.option("--L", "L", type=float, required=True)
@click.option("--r", type=float, default=0.0, show_default=True, help="Distance from the center")
@click.option("--gamma", type=float, default=0.0, show_default=True, help="(u(x) - inf u)/R")
@click.option("--out", type=str, required=False, help="Report name or path")
@click.pass_context
def eval_cmd(ctx: click.Context, **kwargs: Any) -> int:
    """Evaluate the bound at (r, gamma) for explicit parameters."""
    inp = make_inputs(kwargs)
    p = guarded(lambda: KorevaarParams(eps=kwargs["eps"], tau=kwargs["tau"], q=kwargs["q"], a0=kwargs["a0"], L=kwargs["L"]))
    report = validate_params(inp, p)
    outputs: dict[str, Any] = {"validity": report.as_dict(), "constants": p.constants(inp)}
    if report.passed:
        bound = guarded(lambda: korevaar_bound(inp, p, kwargs["r"], kwargs["gamma"]))
        outputs.update(log_bound=bound.log_value, bound=bound.value)
        outputs["exponents"] = list(bound_exponents(inp, p, kwargs["r"], kwargs["gamma"]))
        ic(bound.log_value)
    else:
        click.secho(f"constraints violated: {', '.join(report.failed)}", err=True, fg="red")
    inputs = {**inp.model_dump(), **p.model_dump(), "r": kwargs["r"], "gamma": kwargs["gamma"]}
    return emit_report(ctx, "gradient-bound eval", ANCHOR, inputs, outputs, report.passed, kwargs["out"])


@group.command(name="canonical")
@click.option("--delta", type=float, required=True, help="delta in [1/2, 1)")
@click.option("--gamma-star", type=float, required=True, help="Normalized oscillation")
@click.option("--m", type=int, required=True, help="Dimension")
@click.option("--kbar0", type=float, default=1.0, show_default=True, help="max(1, kbar)")
@click.option("--R", "R", type=float, required=True, help="Outer radius")
@click.option("--R1", "R1", type=float, required=False, help="Inner radius; enables the constraint check")
@click.option("--out", type=str, required=False, help="Report name or path")
@click.pass_context
def canonical_cmd(
    ctx: click.Context, delta: float, gamma_star: float, m: int, kbar0: float, R: float, R1: float | None, out: str | None  # noqa: N803
) -> int:
    """The canonical parameter choice and the corollary bound at delta."""
    p = guarded(lambda: canonical_params(delta, gamma_star, m, kbar0, R))
    cor = corollary_bound(delta, gamma_star, m, kbar0)
    outputs: dict[str, Any] = {
        "params": p.model_dump(),
        "corollary": {"prefactor": cor.prefactor, "helper": cor.helper, "exponent": cor.exponent, "log_bound": cor.log_value},
    }
    passed = None
    if R1 is not None:
        inp = guarded(lambda: BoundInputs(m=m, kbar=kbar0, R=R, R1=R1, gamma_star=gamma_star))
        report = validate_params(inp, p)
        outputs["validity"] = report.as_dict()
        outputs["constants"] = p.constants(inp)
        passed = report.passed
    ic(p.q, p.L)
    inputs = {"delta": delta, "gamma_star": gamma_star, "m": m, "kbar0": kbar0, "R": R, "R1": R1}
    return emit_report(ctx, "gradient-bound canonical", ANCHOR, inputs, outputs, passed, out)


@group.command(name="optimize")
@bound_inputs
@click.option("--r", type=float, default=0.0, show_default=True, help="Distance from the center")
@click.option("--gamma", type=float, default=0.0, show_default=True, help="(u(x) - inf u)/R")
@click.option("--seed", type=int, default=0, show_default=True, help="Random seed for restarts")
@click.option("--budget", type=int, default=2000, show_default=True, help="Objective evaluations")
@click.option("--restarts", type=int, default=5, show_default=True, help="Nelder-Mead starts")
@click.option("--out", type=str, required=False, help="Report name or path")
@click.pass_context
def optimize_cmd(ctx: click.Context, **kwargs: Any) -> int:
    """Minimize the bound at (r, gamma) over feasible parameters."""
    inp = make_inputs(kwargs)
    res = guarded(
        lambda: optimize_params(inp, kwargs["r"], kwargs["gamma"], kwargs["seed"], kwargs["budget"], kwargs["restarts"])
    )
    canonical = res.canonical_bound.log_value if res.canonical_bound is not None else None
    outputs = {
        "params": res.params.model_dump(),
        "log_bound": res.bound.log_value,
        "canonical_log_bound": canonical,
        "evaluations": res.evaluations,
        "starts": res.starts,
    }
    ic(res.bound.log_value, canonical)
    passed = canonical is None or res.bound.log_value <= canonical
    inputs = {**inp.model_dump(), **{k: kwargs[k] for k in ("r", "gamma", "seed", "budget", "restarts")}}
    return emit_report(ctx, "gradient-bound optimize", ANCHOR, inputs, outputs, passed, kwargs["out"])


def catenoid(n: int) -> RadialGraph:
    """The planar catenoid u' = 1/sqrt(r^2 - 1) on [1.5, 9.5]."""
    plane = ModelManifold(kind="rotsym", m=2, eta=EuclideanWarp())
    return guarded(lambda: radial_flux_solution(plane, 1.0, 1.5, 9.5, n))


def load_graph(ctx: click.Context, graph: str, manifold: str | None, m: int) -> RadialGraph:
    """A radial graph from a CSV series over a manifold spec (Euclidean of dimension m by default)."""
    man = load_manifold(manifold) if manifold else ModelManifold(kind="rotsym", m=m, eta=EuclideanWarp())
    cols = guarded(lambda: PersistFiles(run_state(ctx)["output_dir"]).read_series(str(Path(graph).resolve())))
    missing = sorted({"r", "u", "du"} - set(cols))
    if missing:
        raise click.ClickException(f"{graph}: missing columns {', '.join(missing)}")
    return guarded(lambda: RadialGraph(man, cols["r"], cols["u"], cols["du"]))


@group.command(name="verify")
@bound_inputs
@click.option("--family", type=click.Choice(["catenoid", "kw-tgraph"]), default="catenoid", show_default=True)
@click.option("--graph", type=str, required=False, help="Radial graph CSV with columns r, u, du; replaces the catenoid")
@click.option("--manifold", type=str, required=False, help="Manifold spec JSON for --graph; default Euclidean of dimension --m")
@click.option("--n", type=int, default=2049, show_default=True, help="Catenoid grid points")
@click.option("--certificate", type=str, required=False, help="Certificate JSON for the kw-tgraph family")
@click.option("--slope", type=float, default=1.0, show_default=True, help="Slope a of u = a t")
@click.option("--samples", type=int, default=41, show_default=True, help="Radial samples")
@click.option("--out", type=str, required=False, help="Report name or path")
@click.pass_context
def verify_cmd(ctx: click.Context, **kwargs: Any) -> int:
    """Check W <= bound on sampled points of a known solution."""
    inp = make_inputs(kwargs)
    if kwargs["family"] == "catenoid":
        graph = load_graph(ctx, kwargs["graph"], kwargs["manifold"], kwargs["m"]) if kwargs["graph"] else catenoid(kwargs["n"])
        result = guarded(lambda: verify_solution_bound(graph, inp, n_samples=kwargs["samples"]))
    else:
        if kwargs["graph"] or kwargs["manifold"]:
            raise click.ClickException("--graph and --manifold apply to radial graphs, not kw-tgraph")
        if not kwargs["certificate"]:
            raise click.ClickException("--certificate is required for the kw-tgraph family")
        cert = guarded(lambda: Certificate.model_validate(read_json(kwargs["certificate"])))
        tgraph = TGraph(build_kw_manifold(cert.spec), kwargs["slope"])
        result = guarded(lambda: verify_solution_bound(tgraph, inp, certificate=cert, n_samples=kwargs["samples"]))
    margin = result["min_log_margin"]
    ic(margin)
    inputs = {**inp.model_dump(), **{k: kwargs[k] for k in ("family", "graph", "manifold", "slope", "samples")}}
    return emit_report(ctx, "gradient-bound verify", ANCHOR, inputs, result, bool(result["passed"]), kwargs["out"])
