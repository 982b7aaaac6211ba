"""
Run reports: accuracy, assertion results, latency statistics and the trace.

JSON reports use stable key names (``accuracy_pct``, ``assertions``,
``latencies``, ``drops``, ``store_full``, ``trace`` ...) and are byte-identical
for identical ``(scenario, seed)`` pairs.
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
import pathlib
from collections.abc import Sequence
from typing import Annotated

# =============================================================================
# THIRD-PARTY IMPORTS
# =============================================================================
from pydantic import Field, NonNegativeFloat, NonNegativeInt
from tabulate import tabulate

# =============================================================================
# LOCAL IMPORTS
# =============================================================================
from .enums import Direction, ReportFormat
from .ext.validation_pydantic import type_checked
from .formatting import format_us
from .io import atomic_write
from .models import SimBaseModel

Percentage = Annotated[float, Field(ge=0.0, le=100.0)]


@type_checked
def accuracy(executed_ok: NonNegativeInt, sent: NonNegativeInt) -> float:
    """Percentage of sent commands that were executed correctly.

    An empty run counts as 100 %.

    Raises
    ------
    ValueError
        ``executed_ok`` exceeds ``sent``.

    Examples
    --------
    >>> accuracy(196, 200)
    98.0
    >>> accuracy(0, 0)
    100.0
    """
    if executed_ok > sent:
        raise ValueError(f"executed_ok ({executed_ok}) exceeds sent ({sent})")
    if sent == 0:
        return 100.0
    return 100.0 * executed_ok / sent


class LatencyStats(SimBaseModel):
    count: NonNegativeInt = 0
    min_us: float | None = None
    mean_us: float | None = None
    max_us: float | None = None

    @classmethod
    def from_samples(cls, samples: Sequence[float]) -> LatencyStats:
        if not samples:
            return cls()
        return cls(
            count=len(samples),
            min_us=float(min(samples)),
            mean_us=sum(samples) / len(samples),
            max_us=float(max(samples)),
        )

    def describe(self) -> str:
        if self.count == 0:
            return "n/a"
        return (
            f"min {format_us(self.min_us)} / mean {format_us(self.mean_us)} / "
            f"max {format_us(self.max_us)} (n={self.count})"
        )


class AssertionResult(SimBaseModel):
    line: int
    time_us: NonNegativeInt
    description: str
    passed: bool
    detail: str = ""


class TraceEntry(SimBaseModel):
    """One frame on the serial link; ``data`` uses named control characters.

    ``start_us`` is when the first start bit left the sender, which is later
    than ``emitted_us`` when the frame queued behind an earlier one.
    """

    emitted_us: NonNegativeInt
    start_us: NonNegativeFloat
    delivered_us: NonNegativeInt
    direction: Direction
    data: str
    framing_error: bool = False


class RunReport(SimBaseModel):
    name: str
    seed: int
    passed: bool
    accuracy_pct: Percentage
    commands_sent: NonNegativeInt
    commands_ok: NonNegativeInt
    feedback_delivered: NonNegativeInt
    assertions: list[AssertionResult] = Field(default_factory=list)
    latencies: dict[str, LatencyStats] = Field(default_factory=dict)
    drops: NonNegativeInt = 0
    store_full: NonNegativeInt = 0
    end_us: NonNegativeInt = 0
    trace: list[TraceEntry] = Field(default_factory=list)


def render_report(
    report: RunReport, fmt: ReportFormat | str = ReportFormat.TEXT
) -> str:
    """Render ``report`` as human text or as indented JSON."""
    if ReportFormat.from_fuzzy_string(str(fmt)) is ReportFormat.JSON:
        return report.model_dump_json(indent=2) + "\n"

    status = "PASS" if report.passed else "FAIL"
    lines = [
        f"Scenario {report.name} (seed {report.seed}): {status}",
        f"Accuracy: {report.accuracy_pct:.2f}% "
        f"({report.commands_ok}/{report.commands_sent} commands, "
        f"{report.feedback_delivered} feedback SMS delivered)",
        f"Drops: {report.drops}  Store full: {report.store_full}  "
        f"Trace: {len(report.trace)} frames over {format_us(report.end_us)}",
    ]
    if report.latencies:
        rows = [(name, stats.describe()) for name, stats in report.latencies.items()]
        table = tabulate(rows, headers=["Latency", "Statistics"], tablefmt="simple")
        lines += ["", table]
    if report.assertions:
        rows = [
            (
                a.line,
                format_us(a.time_us),
                a.description,
                "pass" if a.passed else "FAIL",
                a.detail,
            )
            for a in report.assertions
        ]
        lines += [
            "",
            tabulate(
                rows,
                headers=["Line", "At", "Assertion", "Result", "Detail"],
                tablefmt="simple",
            ),
        ]
    return "\n".join(lines) + "\n"


def save_report(
    report: RunReport,
    path: str | pathlib.Path,
    fmt: ReportFormat | str = ReportFormat.JSON,
) -> pathlib.Path:
    """Render and atomically write ``report`` to ``path``."""
    return atomic_write(path, render_report(report, fmt), mkdir=True)


__all__ = [
    "accuracy",
    "LatencyStats",
    "AssertionResult",
    "TraceEntry",
    "RunReport",
    "render_report",
    "save_report",
]
