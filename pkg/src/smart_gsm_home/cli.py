"""
Command-line entry point.

Exit codes: ``0`` success, ``1`` failed assertions (or an experiment below the
accuracy threshold), ``2`` invalid input.
"""

from __future__ import annotations

# =============================================================================
# METADATA
# =============================================================================
__author__ = "Yeremia Gunawan Adhisantoso"
__email__ = "adhisant@tnt.uni-hannover.de"
__license__ = "Clear BSD"

# =============================================================================
# STANDARD LIBRARY IMPORTS
# =============================================================================
import statistics
from pathlib import Path
from typing import Annotated, Any

# =============================================================================
# THIRD-PARTY IMPORTS
# =============================================================================
import typer
from loguru import logger
from tabulate import tabulate

# =============================================================================
# LOCAL IMPORTS
# =============================================================================
from .baud_table import DEFAULT_FOSC_HZ, baud_table, render_baud_table
from .engine import build_config, run
from .enums import ReportFormat
from .errors import SimError
from .ext.observability_loguru import setup_logging
from .parsing import parse_duration_us, parse_hz, parse_probability
from .repl import repl as run_repl
from .report import render_report, save_report
from .scenario import DEFAULT_SENDER, generate_experiment, parse_scenario
from .timing import Timer

ACCURACY_THRESHOLD_PCT = 98.0
PROG_LOG_NAME = "smart_gsm_home"
FORMAT_HELP = " or ".join(ReportFormat.choices())

app = typer.Typer(
    name="smart-gsm-home",
    help="Simulate an SMS-controlled four-load home controller.",
    no_args_is_help=True,
    add_completion=False,
)


def _fail(message: str) -> typer.Exit:
    typer.echo(f"Error: {message}", err=True)
    return typer.Exit(code=2)


def _parse(parser: Any, value: str | None, option: str) -> Any:
    if value is None:
        return None
    try:
        return parser(value)
    except ValueError as exc:
        raise _fail(f"{option}: {exc}") from None


def _format(value: str) -> ReportFormat:
    report_format = ReportFormat.get_or_none(value)
    if report_format is None:
        choices = ", ".join(ReportFormat.choices())
        raise _fail(f"--format: {value!r} is not one of {choices}")
    return report_format


def _tag_run(ctx: typer.Context, run_id: str) -> None:
    """Restart logging with the app-level options, tagging lines with ``run_id``."""
    setup_logging(PROG_LOG_NAME, run_id=run_id, **(ctx.obj or {}))


@app.callback()
def main_callback(
    ctx: typer.Context,
    verbose: Annotated[
        bool, typer.Option("--verbose", "-v", help="Log at DEBUG level.")
    ] = False,
    log_dir: Annotated[
        Path | None,
        typer.Option("--log-dir", help="Also write a rotating log file here."),
    ] = None,
) -> None:
    ctx.obj = {"verbose": verbose, "log_dir": log_dir}
    setup_logging(PROG_LOG_NAME, verbose=verbose, log_dir=log_dir)


@app.command()
def simulate(
    ctx: typer.Context,
    file: Annotated[Path, typer.Argument(help="Scenario file.")],
    seed: Annotated[
        int | None, typer.Option("--seed", help="Override the scenario seed.")
    ] = None,
    sms_delay_min: Annotated[
        str | None, typer.Option("--sms-delay-min", help="e.g. 1000ms")
    ] = None,
    sms_delay_max: Annotated[
        str | None, typer.Option("--sms-delay-max", help="e.g. 2500ms")
    ] = None,
    loss_rate: Annotated[
        str | None, typer.Option("--loss-rate", help="0..1 or percent.")
    ] = None,
    fmt: Annotated[str, typer.Option("--format", help=FORMAT_HELP)] = "text",
    output: Annotated[
        Path | None,
        typer.Option("--output", "-o", help="Write the report to this file."),
    ] = None,
) -> None:
    """Run a scenario file and report its assertions and accuracy."""
    report_format = _format(fmt)
    overrides = {
        "seed": seed,
        "network.delay_min_us": _parse(
            parse_duration_us, sms_delay_min, "--sms-delay-min"
        ),
        "network.delay_max_us": _parse(
            parse_duration_us, sms_delay_max, "--sms-delay-max"
        ),
        "network.loss_rate": _parse(parse_probability, loss_rate, "--loss-rate"),
    }
    try:
        text = file.read_text(encoding="utf-8")
    except OSError as exc:
        raise _fail(f"cannot read scenario {file}: {exc.strerror or exc}") from None

    try:
        scenario = parse_scenario(text, name=file.stem)
        cfg = build_config(scenario, overrides=overrides)
        _tag_run(ctx, f"{file.stem}#{cfg.seed}")
        with Timer("simulate") as timer:
            report = run(scenario, overrides=overrides)
    except SimError as exc:
        logger.debug("Scenario rejected: {}", exc.to_dict())
        raise _fail(exc.message) from None
    logger.info("Simulated {} in {:.3f}s wall clock", file.name, timer.elapsed)

    rendered = render_report(report, report_format)
    if output is not None:
        save_report(report, output, report_format)
        logger.info("Report written to {}", output)
    else:
        typer.echo(rendered, nl=False)
    if not report.passed:
        raise typer.Exit(code=1)


@app.command()
def repl(
    seed: Annotated[int, typer.Option("--seed", help="Network seed.")] = 0,
    sender: Annotated[
        str, typer.Option("--sender", help="Your phone number.")
    ] = DEFAULT_SENDER,
) -> None:
    """Act as the phone in an interactive session."""
    run_repl(seed=seed, sender=sender)


@app.command("baud-table")
def baud_table_command(
    fosc: Annotated[
        list[str] | None,
        typer.Option("--fosc", help="Oscillator, e.g. 20MHz; repeatable."),
    ] = None,
    fmt: Annotated[str, typer.Option("--format", help=FORMAT_HELP)] = "text",
) -> None:
    """Print SPBRG, actual rate and error for the standard baud rates."""
    report_format = _format(fmt)
    if fosc:
        frequencies = [_parse(parse_hz, value, "--fosc") for value in fosc]
    else:
        frequencies = list(DEFAULT_FOSC_HZ)
    typer.echo(render_baud_table(baud_table(frequencies), report_format), nl=False)


@app.command()
def experiment(
    ctx: typer.Context,
    commands: Annotated[int, typer.Option("--commands", min=1)] = 200,
    seeds: Annotated[int, typer.Option("--seeds", min=1)] = 30,
    loss_rate: Annotated[str, typer.Option("--loss-rate")] = "0.01",
    sms_delay_min: Annotated[str, typer.Option("--sms-delay-min")] = "1000ms",
    sms_delay_max: Annotated[str, typer.Option("--sms-delay-max")] = "2500ms",
) -> None:
    """Send random valid commands over several seeds and report accuracy."""
    loss = _parse(parse_probability, loss_rate, "--loss-rate")
    delay_min = _parse(parse_duration_us, sms_delay_min, "--sms-delay-min")
    delay_max = _parse(parse_duration_us, sms_delay_max, "--sms-delay-max")

    rows = []
    accuracies: list[float] = []
    with Timer("experiment") as timer:
        for seed in range(seeds):
            scenario = generate_experiment(
                seed,
                commands,
                loss_rate=loss,
                delay_min_us=delay_min,
                delay_max_us=delay_max,
            )
            _tag_run(ctx, f"experiment#{seed}")
            try:
                report = run(scenario)
            except SimError as exc:
                raise _fail(exc.message) from None
            accuracies.append(report.accuracy_pct)
            rows.append(
                (
                    seed,
                    f"{report.accuracy_pct:.2f}",
                    report.drops,
                    report.feedback_delivered,
                )
            )
    mean = statistics.fmean(accuracies)
    headers = ["Seed", "Accuracy %", "Drops", "Feedback"]
    typer.echo(tabulate(rows, headers=headers, tablefmt="simple"))
    typer.echo(f"Mean accuracy over {seeds} seed(s): {mean:.2f}%")
    logger.info("Experiment finished in {:.2f}s wall clock", timer.elapsed)
    if mean < ACCURACY_THRESHOLD_PCT:
        raise typer.Exit(code=1)


def main() -> None:
    app()


__all__ = ["app", "main"]
