"""
This is the entry point for the tickwork CLI.

Each subcommand parses its flags, hands a parameter dict to the task
registry and prints the result: the document on standard output (or to
`--output`), failures as a one-line JSON `{error_kind, detail}` on standard
error with exit code 2.
"""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable

import click
import dotenv
from pydantic import ValidationError
from rich.logging import RichHandler

from config import SUBCOMMAND_FORMATS, RunConfig, default_log_level, default_seed
from tasks.builtin.registry import create_default_registry
from UI.TUI import TUI, get_console
from utils.errors import TickworkError
from utils.path import write_output
from utils.text import parse_float_list, parse_int_list, parse_time_range, render

dotenv.load_dotenv()

logger = logging.getLogger("tickwork")

registry = create_default_registry()


def _configure_logging(level: str) -> None:
    handler = RichHandler(console=get_console(), show_path=False, show_time=False)
    logging.basicConfig(level=level.upper(), format="%(message)s", handlers=[handler], force=True)


def _fail(name: str, error_kind: str, detail: str) -> None:
    tui = TUI()
    if tui.interactive:
        tui.print_error(name, error_kind, detail)
    click.echo(json.dumps({"error_kind": error_kind, "detail": detail}), err=True)
    sys.exit(2)


def _parse(name: str, flag: str, parser: Callable[[str], Any], text: str | None) -> Any:
    if text is None:
        return None
    try:
        return parser(text)
    except ValueError as e:
        _fail(name, "validation", f"Invalid value for {flag}: {e}")


def _parse_tolerances(items: tuple[str, ...]) -> dict[str, float]:
    overrides: dict[str, float] = {}
    for item in items:
        key, sep, value = item.partition("=")
        try:
            if not sep:
                raise ValueError("expected NAME=VALUE")
            overrides[key.strip()] = float(value)
        except ValueError as e:
            _fail("tickwork", "validation", f"Invalid --tolerance '{item}': {e}")
    return overrides


def _run(
    ctx: click.Context,
    name: str,
    params: dict[str, Any],
    spec_paths: list[Path],
    out: str,
    output: Path | None,
    seed: int | None = None,
    threads: int = 1,
) -> None:
    """
    Runs one task and prints or writes its result.

    Args:
        ctx: The click context carrying group-level options.
        name: Subcommand name.
        params: Task parameters.
        spec_paths: Input files of the run.
        out: Output format.
        output: Destination file; None prints to standard output.
        seed: Master seed; None uses TICKWORK_SEED or 0.
        threads: Worker threads for sampling.
    """
    try:
        run = RunConfig(
            subcommand=name,
            spec_paths=spec_paths,
            output=output,
            output_format=out,
            seed=default_seed() if seed is None else seed,
            threads=threads,
            tolerance_overrides=ctx.obj.get("tolerances", {}),
        )
    except ValidationError as e:
        _fail(name, "validation", "; ".join(err.get("msg", "invalid") for err in e.errors()))
    except TickworkError as e:
        _fail(name, e.kind, e.detail)

    result = registry.invoke(name, params, run)
    if not result.success:
        _fail(name, result.error_kind or "internal", result.error or "")

    text = render(run.output_format, result.payload, result.rows, result.columns)
    if output is not None:
        target = write_output(text, output)
        logger.info(f"Wrote {run.output_format} result to {target}")
    else:
        click.echo(text, nl=False)

    tui = TUI()
    if tui.interactive:
        task = registry.get(name)
        tui.print_summary(name, task.kind.value if task else "model", result.summary, output)


def _output_options(name: str) -> Callable:
    """Adds --out and --output, with the formats the subcommand can emit."""
    formats = SUBCOMMAND_FORMATS[name]

    def decorator(f: Callable) -> Callable:
        f = click.option(
            "-o", "--output", type=click.Path(dir_okay=False, path_type=Path), default=None,
            help="Write the result to this file instead of standard output.",
        )(f)
        f = click.option(
            "--out", type=click.Choice(formats), default=formats[0], show_default=True,
            help="Output format.",
        )(f)
        return f

    return decorator


_spec_option = click.option(
    "--spec", "spec", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Clock spec file (JSON)."
)
_seed_option = click.option("--seed", type=int, default=None, help="Master seed (default: TICKWORK_SEED or 0).")
_threads_option = click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True,
                               help="Worker threads; results do not depend on it.")


@click.group()
@click.option("--tolerance", "tolerances", multiple=True, metavar="NAME=VALUE",
              help="Override a numerical tolerance, e.g. structure=1e-9. Repeatable.")
@click.option("--log-level", default=None, help="Logging level (default: TICKWORK_LOG_LEVEL or WARNING).")
@click.version_option(package_name="tickwork", message="%(prog)s %(version)s")
@click.pass_context
def main(ctx: click.Context, tolerances: tuple[str, ...], log_level: str | None) -> None:
    """tickwork: simulate and analyse quantum ticking clocks."""
    _configure_logging(log_level or default_log_level())
    ctx.ensure_object(dict)
    ctx.obj["tolerances"] = _parse_tolerances(tolerances)


@main.command()
@_spec_option
@_output_options("validate")
@click.pass_context
def validate(ctx: click.Context, spec: Path, out: str, output: Path | None) -> None:
    """Validate a clock spec and report its property flags."""
    _run(ctx, "validate", {}, [spec], out, output)


@main.command()
@_spec_option
@click.option("--times", required=True, help="Time grid as a:b:step, or a single time.")
@click.option("--n-max", type=int, default=64, show_default=True, help="Top register bin.")
@click.option("--plot-data", is_flag=True, help="Emit long-format CSV (t, n, p).")
@_output_options("evolve")
@click.pass_context
def evolve(
    ctx: click.Context, spec: Path, times: str, n_max: int, plot_data: bool, out: str, output: Path | None
) -> None:
    """Evolve a clock and print p_{n|t} with its mean and variance."""
    grid = _parse("evolve", "--times", parse_time_range, times)
    params = {"times": grid, "n_max": n_max, "plot_data": plot_data}
    _run(ctx, "evolve", params, [spec], "csv" if plot_data else out, output)


@main.command()
@_spec_option
@click.option("--method", type=click.Choice(["eig-derivative", "slope-fit", "cross"]),
              default="eig-derivative", show_default=True, help="How the rates are computed.")
@_output_options("fcs")
@click.pass_context
def fcs(ctx: click.Context, spec: Path, method: str, out: str, output: Path | None) -> None:
    """Compute the tick rate nu, variance rate Sigma and precision R1."""
    _run(ctx, "fcs", {"method": method}, [spec], out, output)


@main.command("waiting-time")
@_spec_option
@click.option("--t-max", type=float, default=None, help="End of the time grid (extended automatically if too short).")
@click.option("--points", type=int, default=2001, show_default=True, help="Grid points.")
@click.option("--identity", is_flag=True, help="Also check R1 = R2 for a reset clock.")
@click.option("--plot-data", is_flag=True, help="Emit long-format CSV (t, series, value).")
@_output_options("waiting-time")
@click.pass_context
def waiting_time(
    ctx: click.Context, spec: Path, t_max: float | None, points: int, identity: bool, plot_data: bool,
    out: str, output: Path | None,
) -> None:
    """Tabulate the waiting-time density with its mean, variance and R2."""
    params = {"t_max": t_max, "points": points, "identity": identity, "plot_data": plot_data}
    _run(ctx, "waiting-time", params, [spec], "csv" if plot_data else out, output)


@main.command()
@_spec_option
@click.option("--tau", "taus", required=True, help="Comma-separated averaging times.")
@click.option("--mode", type=click.Choice(["formula", "trajectory"]), default="formula", show_default=True)
@click.option("--horizon", type=float, default=None, help="Trajectory length for --mode trajectory.")
@click.option("--bins", type=int, default=None, help="Two-sample terms M for --mode trajectory.")
@_seed_option
@_output_options("allan")
@click.pass_context
def allan(
    ctx: click.Context, spec: Path, taus: str, mode: str, horizon: float | None, bins: int | None,
    seed: int | None, out: str, output: Path | None,
) -> None:
    """Allan variance Sigma/tau, or its estimate from a sampled trajectory."""
    params = {"taus": _parse("allan", "--tau", parse_float_list, taus), "mode": mode,
              "horizon": horizon, "bins": bins}
    _run(ctx, "allan", params, [spec], out, output, seed)


@main.command()
@_spec_option
@click.option("--horizon", type=float, required=True, help="End of the simulated window.")
@click.option("--n-traj", type=int, default=1, show_default=True, help="Number of trajectories.")
@_seed_option
@_threads_option
@_output_options("sample")
@click.pass_context
def sample(
    ctx: click.Context, spec: Path, horizon: float, n_traj: int, seed: int | None, threads: int,
    out: str, output: Path | None,
) -> None:
    """Sample tick records of one clock."""
    _run(ctx, "sample", {"horizon": horizon, "n_traj": n_traj}, [spec], out, output, seed, threads)


_pair_options = [
    click.option("--spec-a", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Clock A."),
    click.option("--spec-b", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Clock B."),
    click.option("--horizon", type=float, required=True, help="End of the simulated window."),
]


def _with_pair_options(f: Callable) -> Callable:
    for option in reversed(_pair_options):
        f = option(f)
    return f


@main.command()
@_with_pair_options
@click.option("--n-seq", type=int, default=1, show_default=True, help="Number of tick sequences.")
@_seed_option
@_threads_option
@_output_options("pair")
@click.pass_context
def pair(
    ctx: click.Context, spec_a: Path, spec_b: Path, horizon: float, n_seq: int, seed: int | None, threads: int,
    out: str, output: Path | None,
) -> None:
    """Sample shared-register tick sequences of two clocks."""
    _run(ctx, "pair", {"horizon": horizon, "n_seq": n_seq}, [spec_a, spec_b], out, output, seed, threads)


@main.command("relative-counts")
@_with_pair_options
@click.option("--n-seq", type=int, default=1000, show_default=True, help="Number of tick sequences.")
@click.option("--n", "n", type=int, default=1, show_default=True, help="Tick index of clock A.")
@click.option("--confidence", type=float, default=0.95, show_default=True, help="Wilson interval level.")
@_seed_option
@_threads_option
@_output_options("relative-counts")
@click.pass_context
def relative_counts_command(
    ctx: click.Context, spec_a: Path, spec_b: Path, horizon: float, n_seq: int, n: int, confidence: float,
    seed: int | None, threads: int, out: str, output: Path | None,
) -> None:
    """Distribution of B's tick count at the n-th tick of A."""
    params = {"horizon": horizon, "n_seq": n_seq, "n": n, "confidence": confidence}
    _run(ctx, "relative-counts", params, [spec_a, spec_b], out, output, seed, threads)


@main.command()
@_spec_option
@click.option("--delta", type=float, required=True, help="Step length.")
@click.option("--steps", type=int, required=True, help="Number of steps k.")
@click.option("--order", type=click.Choice(["exact", "first"]), default="exact", show_default=True)
@_output_options("discrete")
@click.pass_context
def discrete(
    ctx: click.Context, spec: Path, delta: float, steps: int, order: str, out: str, output: Path | None
) -> None:
    """First-tick pmf of the bit-register picture."""
    _run(ctx, "discrete", {"delta": delta, "steps": steps, "order": order}, [spec], out, output)


@main.command()
@click.option("--channel", required=True, type=click.Path(dir_okay=False, path_type=Path),
              help="Channel file (JSON with dim and kraus).")
@_seed_option
@_output_options("ki")
@click.pass_context
def ki(ctx: click.Context, channel: Path, seed: int | None, out: str, output: Path | None) -> None:
    """Decompose the invariant states of a channel into blocks."""
    _run(ctx, "ki", {}, [channel], out, output, seed)


@main.command()
@click.option("--omega", type=float, required=True, help="Rabi frequency.")
@click.option("--time", "total_time", type=float, required=True, help="Readout time T.")
@click.option("--m", "counts", default="0,1,2,4,8,16,32,64", show_default=True,
              help="Comma-separated numbers of readings.")
@click.option("--schedule", default="fixed", show_default=True, help="fixed or jitter:<width>.")
@_seed_option
@_output_options("zeno")
@click.pass_context
def zeno(
    ctx: click.Context, omega: float, total_time: float, counts: str, schedule: str, seed: int | None,
    out: str, output: Path | None,
) -> None:
    """Survival of a Rabi-driven register under repeated readings."""
    params = {"omega": omega, "time": total_time, "counts": _parse("zeno", "--m", parse_int_list, counts),
              "schedule": schedule}
    _run(ctx, "zeno", params, [], out, output, seed)


@main.command()
@click.option("--dim", type=int, required=True, help="Clockwork dimension d.")
@click.option("--omega", type=float, default=1.0, show_default=True, help="Level spacing.")
@click.option("--alphas", default="0.5", show_default=True, help="Comma-separated shifts in [0, 1).")
@click.option("--time-points", type=int, default=16, show_default=True, help="Samples per tick interval.")
@_output_options("swp")
@click.pass_context
def swp(
    ctx: click.Context, dim: int, omega: float, alphas: str, time_points: int, out: str, output: Path | None
) -> None:
    """Equally spaced clock with a shifted readout basis."""
    params = {"dim": dim, "omega": omega, "alphas": _parse("swp", "--alphas", parse_float_list, alphas),
              "time_points": time_points}
    _run(ctx, "swp", params, [], out, output)


if __name__ == "__main__":
    main()
