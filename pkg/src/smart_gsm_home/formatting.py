"""Human-readable formatters for simulated time, baud rates and serial bytes.

Report text, the baud table, REPL output and log lines all go through these
helpers so the same quantity always prints the same way.
"""

from __future__ import annotations

__author__ = "Yeremia Gunawan Adhisantoso"
__email__ = "adhisant@tnt.uni-hannover.de"
__license__ = "BSD 3-Clause"

__all__ = ["format_us", "format_baud", "format_error_pct", "escape_bytes"]

_CONTROL_NAMES = {0x0D: "<CR>", 0x0A: "<LF>", 0x1A: "<SUB>", 0x1B: "<ESC>"}


def format_us(us: float, *, precision: int = 1) -> str:
    """Format a simulated duration given in microseconds.

    Sub-millisecond values stay in µs, sub-second values render as
    milliseconds and everything longer as seconds.

    Examples
    --------
    >>> format_us(300)
    '300us'
    >>> format_us(1041.67)
    '1.0ms'
    >>> format_us(2_500_000)
    '2.5s'
    """
    us = float(us)
    if us < 0:
        return f"-{format_us(-us, precision=precision)}"
    if us < 1_000:
        return f"{us:.0f}us"
    if us < 1_000_000:
        return f"{us / 1_000:.{precision}f}ms"
    return f"{us / 1_000_000:.{precision}f}s"


def format_baud(rate: float, *, compact: bool = False) -> str:
    """Format a baud rate rounded to the nearest integer.

    With ``compact=True`` rates of 10 000 and above use a ``k`` suffix with
    two decimals (``19531.25 -> "19.53k"``).
    """
    if compact and rate >= 10_000:
        return f"{rate / 1000:.2f}k"
    return str(round(rate))


def format_error_pct(error_pct: float) -> str:
    """Format a percentage error to two decimals, dropping trailing zeros.

    Examples
    --------
    >>> format_error_pct(-1.35732)
    '-1.36'
    >>> format_error_pct(-0.0032)
    '0'
    """
    #? Adding 0.0 folds a rounded -0.0 into 0.0 so tiny negatives print as 0.
    rounded = round(error_pct, 2) + 0.0
    return f"{rounded:g}"


def escape_bytes(data: bytes) -> str:
    """Render serial bytes as printable text with named control characters.

    Examples
    --------
    >>> escape_bytes(b"AT+CMGD=1\\r")
    'AT+CMGD=1<CR>'
    """
    parts: list[str] = []
    for byte in data:
        if byte in _CONTROL_NAMES:
            parts.append(_CONTROL_NAMES[byte])
        elif 0x20 <= byte < 0x7F:
            parts.append(chr(byte))
        else:
            parts.append(f"<{byte:02X}>")
    return "".join(parts)
