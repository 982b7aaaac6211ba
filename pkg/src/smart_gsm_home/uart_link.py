"""
Baud-rate generator arithmetic and the timed controller <-> modem serial link.

The controller's USART runs in asynchronous 8-bit mode with SYNC=0, BRGH=0
and BRG16=0, so its bit clock is ``F_OSC / (64 * (SPBRG + 1))``. The modem
side runs at an exact nominal rate. Every byte travels as a 10-bit frame
(start + 8 data + stop).

Examples
--------
>>> round(calculated_baud(BrgConfig(fosc_hz=20_000_000, spbrg=32)))
9470
>>> best_spbrg(20_000_000, 300, 3.0) is None
True
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
import math
from dataclasses import dataclass
from typing import Annotated, Literal, NamedTuple

# =============================================================================
# THIRD-PARTY IMPORTS
# =============================================================================
from loguru import logger
from pydantic import Field, NonNegativeInt, PositiveFloat, PositiveInt

# =============================================================================
# LOCAL IMPORTS
# =============================================================================
from .enums import Direction
from .ext.validation_pydantic import type_checked
from .models import SimBaseModel
from .timing import US_PER_S

# =============================================================================
# CONSTANTS
# =============================================================================
BRG_DIVISOR = 64
BRG_MODE = "SYNC=0,BRGH=0,BRG16=0"
SPBRG_MAX = 255
BITS_PER_FRAME = 10
# ? Smallest threshold that keeps every feasible 8-bit/BRGH=0 table cell
# ? (worst is -2.42 %) and rejects every infeasible one.
DEFAULT_MAX_ERROR_PCT = 3.0
# ? Mid-bit sampling drifts by less than half a bit over a 10-bit frame.
COMPATIBILITY_TOLERANCE = 0.05
MODEM_BAUD = 9600.0


class BrgConfig(SimBaseModel):
    """Oscillator frequency and SPBRG divisor of the controller's USART."""

    fosc_hz: PositiveInt
    spbrg: Annotated[int, Field(ge=0, le=SPBRG_MAX)]
    mode: Literal["SYNC=0,BRGH=0,BRG16=0"] = BRG_MODE


class BrgChoice(NamedTuple):
    spbrg: int
    actual: float
    error_pct: float


@type_checked
def calculated_baud(cfg: BrgConfig) -> float:
    """Actual baud rate produced by ``cfg``, without rounding."""
    return cfg.fosc_hz / (BRG_DIVISOR * (cfg.spbrg + 1))


@type_checked
def error_percent(actual: float, desired: PositiveFloat) -> float:
    """Signed deviation of ``actual`` from ``desired`` in percent."""
    return 100.0 * (actual - desired) / desired


@type_checked
def best_spbrg(
    fosc_hz: PositiveInt,
    desired: PositiveFloat,
    max_error_pct: PositiveFloat = DEFAULT_MAX_ERROR_PCT,
) -> BrgChoice | None:
    """Pick the SPBRG value whose rate is closest to ``desired``.

    Scans every 8-bit divisor; ties go to the smaller SPBRG.

    Returns
    -------
    BrgChoice or None
        ``None`` when even the best divisor misses by more than
        ``max_error_pct``.
    """
    best: BrgChoice | None = None
    for spbrg in range(SPBRG_MAX + 1):
        actual = fosc_hz / (BRG_DIVISOR * (spbrg + 1))
        error = error_percent(actual, desired)
        if best is None or abs(error) < abs(best.error_pct):
            best = BrgChoice(spbrg, actual, error)
    if best is None or abs(best.error_pct) > max_error_pct:
        return None
    return best


@type_checked
def transfer_duration(byte_count: NonNegativeInt, baud: PositiveFloat) -> float:
    """Microseconds needed to shift ``byte_count`` 10-bit frames at ``baud``."""
    return byte_count * (BITS_PER_FRAME * US_PER_S / baud)


@type_checked
def link_compatible(tx_baud: PositiveFloat, rx_baud: PositiveFloat) -> bool:
    """Whether a receiver at ``rx_baud`` can sample a sender at ``tx_baud``."""
    return abs(tx_baud - rx_baud) / rx_baud <= COMPATIBILITY_TOLERANCE


# =============================================================================
# SERIAL CHANNEL
# =============================================================================
@dataclass(slots=True)
class LinkEndpoint:
    """One side of the serial link and its transmit queue."""

    name: str
    actual_baud_hz: float
    per_byte_us: float = 0.0
    busy_until_us: float = 0.0

    def __post_init__(self) -> None:
        self.per_byte_us = transfer_duration(1, self.actual_baud_hz)


@dataclass(frozen=True, slots=True)
class SerialFrame:
    """A block of bytes written by one endpoint, as seen on the wire.

    ``emitted_us`` is when the sender handed the bytes to its USART,
    ``start_us`` when the first start bit went out (after queued
    predecessors), and ``delivered_us`` the first whole microsecond at which
    the last stop bit has arrived. With ``framing_error`` set the receiver
    gets no usable byte values.
    """

    direction: Direction
    data: bytes
    emitted_us: int
    start_us: float
    per_byte_us: float
    delivered_us: int
    framing_error: bool = False

    def byte_arrival_us(self, position: int) -> float:
        """Exact time the byte at ``position`` has been fully received."""
        return self.start_us + (position + 1) * self.per_byte_us


class SerialLink:
    """Full-duplex virtual serial channel between controller and modem.

    Parameters
    ----------
    controller_brg : BrgConfig
        Divisor setting of the controller's USART.
    modem_baud : float, optional
        Exact rate of the modem side.
    """

    def __init__(
        self, controller_brg: BrgConfig, modem_baud: float = MODEM_BAUD
    ) -> None:
        self.controller = LinkEndpoint("controller", calculated_baud(controller_brg))
        self.modem = LinkEndpoint("modem", modem_baud)
        self._compatible = {
            Direction.TO_MODEM: link_compatible(
                self.controller.actual_baud_hz, self.modem.actual_baud_hz
            ),
            Direction.TO_CONTROLLER: link_compatible(
                self.modem.actual_baud_hz, self.controller.actual_baud_hz
            ),
        }
        if not all(self._compatible.values()):
            logger.warning(
                "Serial rates {:.1f} / {:.1f} baud are incompatible; "
                "every frame will carry a framing error",
                self.controller.actual_baud_hz,
                self.modem.actual_baud_hz,
            )

    def compatible(self, direction: Direction) -> bool:
        return self._compatible[direction]

    def idle(self, direction: Direction, now_us: int) -> bool:
        """Whether the sender for ``direction`` has shifted out its last frame."""
        sender = self.controller if direction is Direction.TO_MODEM else self.modem
        return sender.busy_until_us <= now_us

    def write(self, direction: Direction, data: bytes, now_us: int) -> SerialFrame:
        """Queue ``data`` on the sending endpoint and return its wire timing."""
        sender = self.controller if direction is Direction.TO_MODEM else self.modem
        start = max(float(now_us), sender.busy_until_us)
        end = start + len(data) * sender.per_byte_us
        sender.busy_until_us = end
        return SerialFrame(
            direction=direction,
            data=bytes(data),
            emitted_us=now_us,
            start_us=start,
            per_byte_us=sender.per_byte_us,
            delivered_us=math.ceil(end),
            framing_error=not self._compatible[direction],
        )


__all__ = [
    "BrgConfig",
    "BrgChoice",
    "calculated_baud",
    "error_percent",
    "best_spbrg",
    "transfer_duration",
    "link_compatible",
    "LinkEndpoint",
    "SerialFrame",
    "SerialLink",
    "DEFAULT_MAX_ERROR_PCT",
    "MODEM_BAUD",
]
