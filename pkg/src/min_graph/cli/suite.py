"""Run the acceptance battery.

Shipped checks live in ``min_graph.checks``; directories given with
--checks-path may add a ``checks`` package whose modules each define a
``Check`` class. Checks run on a thread pool. A check that raises is recorded
with its error message and stack trace and the suite carries on.
"""

import importlib
import os
import pkgutil
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from typing import Any

import click
from icecream import ic

from min_graph.checks import SHIPPED_CHECKS
from min_graph.checks.base import BaseCheck, CheckOutcome
from min_graph.cli.common import EXIT_FAILED, EXIT_OK, make_meta, read_json, run_state
from min_graph.persist_files import PersistFiles
from min_graph.report_model_dto import ReportDTO, to_jsonable


def get_checks(names: list[str], checks_path: list[str], quick: bool) -> dict[str, BaseCheck]:
    """Load and return a check instance for each name.

    With no names, every shipped check and every module of the extra
    ``checks`` packages is loaded.

    Raises:
        click.ClickException: If a name matches no check, or a module has no Check class.
    """
    extra: list[str] = []
    for path in checks_path:
        if os.path.exists(path) and path not in sys.path:
            sys.path.append(path)
    if checks_path:
        try:
            package = importlib.import_module("checks")
        except ModuleNotFoundError as e:
            raise click.ClickException(f"no checks package under {list(checks_path)}") from e
        extra = sorted(info.name for info in pkgutil.iter_modules(package.__path__))
    known = list(SHIPPED_CHECKS) + [n for n in extra if n not in SHIPPED_CHECKS]
    checks: dict[str, BaseCheck] = {}
    for name in names or known:
        if name not in known:
            raise click.ClickException(f"Check {name} does not exist")
        module_name = f"min_graph.checks.{name}" if name in SHIPPED_CHECKS else f"checks.{name}"
        module = importlib.import_module(module_name)
        if not hasattr(module, "Check"):
            raise click.ClickException(f"No Check class in {module_name}")
        checks[name] = module.Check(quick=quick)
    return checks


def run_check(check: BaseCheck, config: dict[str, Any]) -> tuple[CheckOutcome | None, BaseException | None, str | None]:
    """Validate and handle one check; exceptions are returned, not raised."""
    try:
        check.validate(config)
        return check.handle(config), None, None
    except Exception as e:
        return None, e, traceback.format_exc()


@click.command()
@click.option("--quick", is_flag=True, default=False, help="Reduced grids")
@click.option("--workers", type=int, default=4, show_default=True, help="Checks run concurrently")
@click.option("--checks", "names", type=str, multiple=True, help="Check to run, can be used multiple times; default all")
@click.option(
    "--checks-path",
    type=str,
    multiple=True,
    help="A directory containing an extra checks package, multiple allowed",
)
@click.option("--settings", type=str, required=False, help="JSON file mapping check name to settings")
@click.pass_context
def main(ctx: click.Context, quick: bool, workers: int, names: tuple[str, ...], checks_path: tuple[str, ...], settings: str | None) -> int:
    """Run the checks and write one report per check plus a suite summary."""
    checks = get_checks(list(names), list(checks_path), quick)
    per_check = read_json(settings) if settings else {}
    if not isinstance(per_check, dict):
        raise click.ClickException(f"{settings}: expected an object of check settings")
    order = list(checks)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = {name: pool.submit(run_check, checks[name], per_check.get(name, {})) for name in order}
        results = {name: futures[name].result() for name in order}

    repo = PersistFiles(run_state(ctx)["output_dir"])
    summary: dict[str, Any] = {}
    for name in order:
        check = checks[name]
        outcome, error, trace = results[name]
        passed = outcome.passed if outcome is not None else False
        report = ReportDTO(
            command=f"check {name}",
            anchor=check.anchor,
            inputs=to_jsonable({"quick": quick, "settings": check.resolve(per_check.get(name, {}))}),
            outputs=to_jsonable(outcome.outputs) if outcome is not None else {},
            passed=passed,
            meta=make_meta(ctx, error, trace),
        )
        repo.write_report(f"check-{name}", report)
        summary[name] = {"passed": passed, "error": str(error) if error is not None else None}
        if error is not None:
            click.secho(f"{name}: error: {error}", err=True, fg="red")
        else:
            click.secho(f"{name}: {'pass' if passed else 'FAIL'}", fg="green" if passed else "red")

    all_passed = all(v["passed"] for v in summary.values())
    location = repo.write_report(
        "suite",
        ReportDTO(command="suite", anchor="acceptance battery", inputs={"quick": quick, "checks": order}, outputs=summary, passed=all_passed, meta=make_meta(ctx)),
    )
    ic(sum(v["passed"] for v in summary.values()), len(summary))
    click.echo(f"suite: report written to {location}")
    return EXIT_OK if all_passed else EXIT_FAILED
