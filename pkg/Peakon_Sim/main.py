"""
Command line for the peakon simulator.

    python code.py run --scenario scenarios/fig1a.toml --out-dir out
    python code.py study --scenario scenarios/fig2.toml --format json
    python code.py check --suite identities --seed 42

Every failure the library raises is a PeakonError; it is reported here and
turned into the exit code the error carries.
"""

import os
import sys
import traceback

import click

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "lib"))

import scenario as sc  # noqa: E402
import suites  # noqa: E402
from debugcolor import co, say, status_table  # noqa: E402
from errors import PeakonError  # noqa: E402
from functions import Functions  # noqa: E402

debug = False


def debug_print(statement):
    if debug:
        say(co("[MAIN]" + str(statement), "blue", "bold"))


def error_print(statement):
    say(co("[MAIN]" + str(statement), "red", "bold"))


def fail(e):
    error_print(f"{type(e).__name__}: {e}")
    debug_print("".join(traceback.format_exception(e)))
    sys.exit(e.exit_code)


def parse_eps(ctx, param, value):
    if value is None:
        return None
    try:
        eps = [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a comma separated list of numbers, got {value!r}")
    if not eps:
        raise click.BadParameter("at least one eps value is required")
    return eps


def overrides(dt, t_end, eps):
    return {"dt": dt, "t_end": t_end, "eps": eps}


scenario_option = click.option(
    "--scenario",
    "scenario_path",
    required=True,
    type=click.Path(dir_okay=False),
    help="TOML scenario or study file.",
)
out_dir_option = click.option(
    "--out-dir",
    envvar="PEAKON_OUT_DIR",
    default="out",
    show_default=True,
    type=click.Path(file_okay=False),
    help="Output directory (falls back to $PEAKON_OUT_DIR).",
)
dt_option = click.option("--dt", type=float, default=None, help="Override [sim] dt.")
t_end_option = click.option("--t-end", type=float, default=None, help="Override [sim] t_end.")
eps_option = click.option(
    "--eps", callback=parse_eps, default=None, help="Comma separated mollifier widths."
)


@click.group()
@click.option("--debug/--no-debug", default=False, help="Coloured progress on stderr.")
def cli(**kwargs):
    global debug
    debug = kwargs["debug"]
    debug_print("debug output on")


@cli.command()
@scenario_option
@out_dir_option
@dt_option
@t_end_option
@eps_option
def run(scenario_path, out_dir, dt, t_end, eps):
    """Evolve one scenario and write its trajectory, energy, events and report."""
    try:
        scenario = sc.load_scenario(scenario_path, overrides(dt, t_end, eps), debug)
        debug_print(f"loaded {scenario.name}: {scenario.note or 'no positions note'}")
        written = Functions(debug).run_scenario(scenario, out_dir)
    except PeakonError as e:
        fail(e)
    for path in written:
        click.echo(path)


@cli.command()
@scenario_option
@out_dir_option
@dt_option
@t_end_option
@eps_option
@click.option(
    "--format",
    "out_format",
    type=click.Choice(["csv", "json"]),
    default="csv",
    show_default=True,
)
def study(scenario_path, out_dir, dt, t_end, eps, out_format):
    """Run a dispersive-limit study: one regularized run per eps."""
    try:
        plan = sc.load_study(scenario_path, overrides(dt, t_end, eps), debug)
        report, path = Functions(debug).run_study(plan, out_dir, out_format)
    except PeakonError as e:
        fail(e)
    click.echo(f"{'eps':>10} {'sup distance':>14} {'min gap':>14}")
    for e, dist, gap in zip(report.eps_values, report.sup_distances, report.min_gaps):
        click.echo(f"{e:>10g} {dist:>14.6e} {gap:>14.6e}")
    if report.event_times:
        click.echo(f"sticky merges at t = {', '.join(f'{t:.9f}' for t in report.event_times)}")
    if report.collision_case:
        click.echo(f"collision case: {report.collision_case}")
    click.echo(path)


@cli.command()
@click.option(
    "--suite",
    "names",
    multiple=True,
    type=click.Choice(list(suites.commands)),
    help="Suite to run; repeat for several. Default: all.",
)
@click.option("--seed", type=int, default=suites.SEED, show_default=True)
@out_dir_option
def check(names, seed, out_dir):
    """Run verification suites and write check_report.json."""
    names = list(names) or list(suites.commands)
    results, path = suites.run_suites(names, seed, out_dir, debug)
    status_table({name: r["passed"] for name, r in results.items()})
    click.echo(path)
    try:
        suites.require_pass(results)
    except PeakonError as e:
        fail(e)


if __name__ == "__main__":
    cli()
