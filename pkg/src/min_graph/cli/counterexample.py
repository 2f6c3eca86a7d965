"""certify-counterexample and search-bc."""

import click
from icecream import ic

from min_graph.cli.common import emit_report, guarded
from min_graph.counterexample import KWSpec, certify, search_bc
from min_graph.report_model_dto import to_jsonable

ANCHOR = "bounded-gradient minimal graph on a manifold with Ric > 0"


def construction_options(fn):
    """--m, --alpha and --beta shared by both commands."""
    fn = click.option("--beta", type=float, default=0.4, show_default=True, help="Exponent entering p")(fn)
    fn = click.option("--alpha", type=float, default=0.4, show_default=True, help="Decay exponent of zeta_1")(fn)
    return click.option("--m", type=int, default=4, show_default=True, help="Dimension, at least 4")(fn)


@click.command()
@construction_options
@click.option("--b", type=float, default=1e3, show_default=True)
@click.option("--c", type=float, default=1e3, show_default=True)
@click.option("--r-max", type=float, default=200.0, show_default=True)
@click.option("--n", type=int, default=8192, show_default=True, help="Grid points")
@click.option("--slope", type=float, default=1.0, show_default=True, help="a in u = a t")
@click.option("--out", type=str, required=False, help="Report name or path")
@click.pass_context
def certify_main(
    ctx: click.Context, m: int, alpha: float, beta: float, b: float, c: float, r_max: float, n: int, slope: float, out: str | None
) -> int:
    """Certify the doubly-warped construction for fixed (b, c)."""
    spec = guarded(lambda: KWSpec(m=m, alpha=alpha, beta=beta, b=b, c=c))
    cert = guarded(lambda: certify(spec, r_max=r_max, n=n, slope=slope))
    for claim in cert.claims:
        colour = {"pass": "green", "fail": "red", "indeterminate": "yellow"}.get(claim.status)
        click.secho(f"  {claim.name}: {claim.status} ({claim.worst_value})", fg=colour)
    ic(cert.sup_sectional, cert.gradient_bound)
    inputs = spec.model_dump() | {"r_max": r_max, "n": n, "slope": slope}
    return emit_report(ctx, "certify-counterexample", ANCHOR, inputs, to_jsonable(cert), cert.passed, out)


@click.command()
@construction_options
@click.option("--grid", type=int, default=7, show_default=True, help="Values per axis on [10, 1e6]")
@click.option("--r-max", type=float, default=200.0, show_default=True)
@click.option("--n-search", type=int, default=1024, show_default=True, help="Grid points while scoring")
@click.option("--n", type=int, default=8192, show_default=True, help="Grid points of the final certificate")
@click.option("--workers", type=int, required=False, help="Scoring threads")
@click.option("--out", type=str, required=False, help="Report name or path")
@click.pass_context
def search_main(
    ctx: click.Context,
    m: int,
    alpha: float,
    beta: float,
    grid: int,
    r_max: float,
    n_search: int,
    n: int,
    workers: int | None,
    out: str | None,
) -> int:
    """Search (b, c) for the largest Ricci margin and certify the best pair."""
    result = guarded(lambda: search_bc(m, alpha, beta, grid=grid, r_max=r_max, n_search=n_search, n=n, workers=workers))
    ic(result.b, result.c, result.margin)
    inputs = {"m": m, "alpha": alpha, "beta": beta, "grid": grid, "r_max": r_max, "n_search": n_search, "n": n}
    return emit_report(ctx, "search-bc", ANCHOR, inputs, to_jsonable(result), result.certificate.passed, out)
