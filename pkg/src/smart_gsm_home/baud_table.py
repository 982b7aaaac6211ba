"""
Baud-rate table for the 8-bit, BRGH=0 generator.

For each oscillator and standard rate the table holds the SPBRG value that
gets closest, the rate it really produces and its error, or nothing when the
best divisor still misses by more than 3 %.

Examples
--------
>>> cell = baud_table([20_000_000])[0].cells[9600]
>>> cell.spbrg, round(cell.actual)
(32, 9470)
"""

from __future__ import annotations

# =============================================================================
# METADATA
# =============================================================================
__author__ = "Yeremia Gunawan Adhisantoso"
__email__ = "adhisant@tnt.uni-hannover.de"
__license__ = "Clear BSD"

import json
from collections.abc import Iterable

from tabulate import tabulate

from .enums import ReportFormat
from .formatting import format_baud, format_error_pct
from .models import SimBaseModel
from .uart_link import DEFAULT_MAX_ERROR_PCT, BrgChoice, best_spbrg

DESIRED_RATES = (300, 1200, 2400, 9600, 10417, 19200, 57600, 115200)
DEFAULT_FOSC_HZ = (20_000_000, 18_432_000, 11_059_200, 8_000_000)
DASH = "-"


class BaudColumn(SimBaseModel):
    """Table column for one oscillator frequency; ``None`` marks a dash."""

    fosc_hz: int
    cells: dict[int, BrgChoice | None]


def baud_table(
    fosc_list: Iterable[int] = DEFAULT_FOSC_HZ,
    desired_rates: Iterable[int] = DESIRED_RATES,
    max_error_pct: float = DEFAULT_MAX_ERROR_PCT,
) -> list[BaudColumn]:
    """Compute one column per oscillator frequency.

    Raises
    ------
    TypeError
        A frequency or rate is not positive.
    """
    rates = list(desired_rates)
    return [
        BaudColumn(
            fosc_hz=fosc,
            cells={rate: best_spbrg(fosc, rate, max_error_pct) for rate in rates},
        )
        for fosc in fosc_list
    ]


def _mhz(fosc_hz: int) -> str:
    return f"{fosc_hz / 1_000_000:g} MHz"


def render_baud_table(
    columns: list[BaudColumn], fmt: ReportFormat | str = ReportFormat.TEXT
) -> str:
    """Render as a text grid (actual, % error and SPBRG per oscillator) or JSON."""
    if ReportFormat.from_fuzzy_string(str(fmt)) is ReportFormat.JSON:
        payload = [
            {
                "fosc_hz": column.fosc_hz,
                "rows": [
                    {
                        "desired": rate,
                        "actual": None if cell is None else round(cell.actual),
                        "error_pct": (
                            None if cell is None else round(cell.error_pct, 2) + 0.0
                        ),
                        "spbrg": None if cell is None else cell.spbrg,
                    }
                    for rate, cell in column.cells.items()
                ],
            }
            for column in columns
        ]
        return json.dumps(payload, indent=2) + "\n"

    headers = ["Baud rate"]
    for column in columns:
        name = _mhz(column.fosc_hz)
        headers += [f"{name}\nactual", "\n% err", "\nSPBRG"]
    rates = list(columns[0].cells) if columns else []
    rows = []
    for rate in rates:
        row: list[str] = [str(rate)]
        for column in columns:
            cell = column.cells.get(rate)
            if cell is None:
                row += [DASH, DASH, DASH]
            else:
                row += [
                    format_baud(cell.actual, compact=True),
                    format_error_pct(cell.error_pct),
                    str(cell.spbrg),
                ]
        rows.append(row)
    return tabulate(rows, headers=headers, tablefmt="simple", stralign="right") + "\n"


__all__ = [
    "DESIRED_RATES",
    "DEFAULT_FOSC_HZ",
    "BaudColumn",
    "baud_table",
    "render_baud_table",
]
