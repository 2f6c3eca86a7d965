"""min-graph command line.

Gathers the subcommands under one click group. ``--config`` supplies option
defaults for the configured subcommand; flags on the command line win.
Exit status: 0 success, 1 usage, configuration or input error, 2 failed
asserted checks.
"""

import logging
import sys

import click

from min_graph import __version__
from min_graph.cli import compare_ode, counterexample, gradient_bound, heat, solve_radial, suite
from min_graph.cli.common import EXIT_ERROR, EXIT_OK, config_default_map, load_config, run_state


@click.group()
@click.version_option(__version__, prog_name="min-graph")
@click.option("--config", "config_path", type=str, required=False, help="JSON run config (RunConfig schema)")
@click.option("--output-dir", type=str, required=False, help="Report directory, default $MIN_GRAPH_OUTPUT_DIR or .")
@click.option("--verbose", is_flag=True, default=False, help="Log solver progress at DEBUG level")
@click.pass_context
def cli(ctx: click.Context, config_path: str | None, output_dir: str | None, verbose: bool) -> None:
    """Minimal graphs over manifolds with non-negative Ricci curvature."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    state = run_state(ctx)
    state["output_dir"] = output_dir
    if config_path:
        config = load_config(config_path)
        ctx.default_map = config_default_map(config)


cli.add_command(solve_radial.main, name="solve-radial")
cli.add_command(gradient_bound.group, name="gradient-bound")
cli.add_command(heat.group, name="heat")
cli.add_command(compare_ode.main, name="compare-ode")
cli.add_command(counterexample.certify_main, name="certify-counterexample")
cli.add_command(counterexample.search_main, name="search-bc")
cli.add_command(suite.main, name="suite")


def main(argv: list[str] | None = None) -> int:
    """Run the CLI and return its exit status."""
    try:
        rv = cli.main(args=argv, prog_name="min-graph", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_ERROR
    except click.Abort:
        click.secho("Aborted", err=True, fg="red")
        return EXIT_ERROR
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
