"""Parsers for scenario and command-line values.

Durations, probabilities and on/off switches appear in scenario files, CLI
flags and REPL input. These helpers give them one spelling and one set of
error messages; each raises ``ValueError`` on input it does not accept so the
caller can attach a location.
"""

from __future__ import annotations

import math
import re
from typing import Any

__author__ = "Yeremia Gunawan Adhisantoso"
__email__ = "adhisant@tnt.uni-hannover.de"
__license__ = "BSD 3-Clause"

__all__ = [
    "parse_duration_us",
    "parse_switch",
    "parse_probability",
    "parse_hz",
    "safe_int",
]

_DURATION_RE = re.compile(
    r"(?P<value>\d+(?:\.\d+)?)\s*(?P<unit>us|ms|s)", re.IGNORECASE
)
_UNIT_TO_US = {"us": 1, "ms": 1_000, "s": 1_000_000}

_ON_STRINGS = frozenset({"on", "1", "true"})
_OFF_STRINGS = frozenset({"off", "0", "false"})


def parse_duration_us(text: str) -> int:
    """Parse a duration such as ``"250us"``, ``"1.5s"`` or ``"6s"`` into µs.

    Parameters
    ----------
    text : str
        Non-negative number followed by one of ``us``, ``ms`` or ``s``.

    Returns
    -------
    int
        Duration in whole microseconds (fractions of a µs are rounded).

    Raises
    ------
    ValueError
        If the text has no unit, a negative value or an unknown unit.

    Examples
    --------
    >>> parse_duration_us("1.5s")
    1500000
    >>> parse_duration_us("250ms")
    250000
    """
    match = _DURATION_RE.fullmatch(text.strip())
    if match is None:
        raise ValueError(f"Cannot parse duration from {text!r}; expected e.g. 250ms")
    value = float(match["value"]) * _UNIT_TO_US[match["unit"].lower()]
    if not math.isfinite(value):
        raise ValueError(f"Duration {text!r} is not finite")
    return round(value)


def parse_switch(value: Any) -> bool:
    """Parse an on/off switch value.

    Raises
    ------
    ValueError
        If ``value`` is not one of ``on``/``off`` (or ``1``/``0``,
        ``true``/``false``).
    """
    if isinstance(value, bool):
        return value
    lowered = str(value).strip().lower()
    if lowered in _ON_STRINGS:
        return True
    if lowered in _OFF_STRINGS:
        return False
    raise ValueError(f"Cannot parse switch from {value!r}; expected 'on' or 'off'")


def parse_probability(text: str) -> float:
    """Parse a probability in ``[0, 1]``; a trailing ``%`` divides by 100."""
    stripped = text.strip()
    scale = 1.0
    if stripped.endswith("%"):
        stripped = stripped[:-1]
        scale = 0.01
    try:
        result = float(stripped) * scale
    except ValueError:
        raise ValueError(f"Cannot parse probability from {text!r}") from None
    #? NaN fails both comparisons, so it is rejected here as well.
    if not 0.0 <= result <= 1.0:
        raise ValueError(f"Probability {text!r} is outside [0, 1]")
    return result


def parse_hz(text: str) -> int:
    """Parse a frequency in Hz, accepting ``k``/``MHz`` style suffixes.

    Examples
    --------
    >>> parse_hz("11.0592MHz")
    11059200
    >>> parse_hz("20000000")
    20000000
    """
    match = re.fullmatch(
        r"(?P<value>\d+(?:\.\d+)?)\s*(?P<unit>hz|khz|mhz|k|m)?",
        text.strip(),
        re.IGNORECASE,
    )
    if match is None:
        raise ValueError(f"Cannot parse frequency from {text!r}")
    unit = (match["unit"] or "hz").lower()
    scale = {"hz": 1, "k": 1_000, "khz": 1_000, "m": 1_000_000, "mhz": 1_000_000}[unit]
    result = round(float(match["value"]) * scale)
    if result <= 0:
        raise ValueError(f"Frequency {text!r} must be positive")
    return result


def safe_int(
    value: Any,
    default: int | None = None,
    *,
    min: int | None = None,
    max: int | None = None,
) -> int | None:
    """Parse an integer and return ``default`` when parsing or bounds fail."""
    try:
        result = int(str(value).strip())
    except (ValueError, TypeError):
        return default
    if min is not None and result < min:
        return default
    if max is not None and result > max:
        return default
    return result
