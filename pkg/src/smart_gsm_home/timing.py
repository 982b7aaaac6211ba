"""Simulated-time units, GSM timestamp text and a wall-clock timer.

Simulated time is an integer count of microseconds since power-on. The modem
renders stored-message times in the ``yy/MM/dd,hh:mm:ss+zz`` form used by
text-mode ``+CMGR`` headers, offset from a configurable epoch.
"""

from __future__ import annotations

# =============================================================================
# STANDARD LIBRARY IMPORTS
# =============================================================================
import datetime as dt
import time

__author__ = "Yeremia Gunawan Adhisantoso"
__email__ = "adhisant@tnt.uni-hannover.de"
__license__ = "BSD 3-Clause"

__all__ = [
    "US_PER_MS",
    "US_PER_S",
    "DEFAULT_EPOCH",
    "gsm_timestamp",
    "Timer",
]

US_PER_MS = 1_000
US_PER_S = 1_000_000

DEFAULT_EPOCH = dt.datetime(2015, 1, 1, 0, 0, 0)


def gsm_timestamp(sim_us: int, epoch: dt.datetime = DEFAULT_EPOCH) -> str:
    """Render a simulated instant as a text-mode SMS service-centre timestamp.

    The zone field is always ``+00``; sub-second precision is truncated.

    Examples
    --------
    >>> gsm_timestamp(0)
    '15/01/01,00:00:00+00'
    >>> gsm_timestamp(61_500_000)
    '15/01/01,00:01:01+00'
    """
    instant = epoch + dt.timedelta(microseconds=sim_us)
    return instant.strftime("%y/%m/%d,%H:%M:%S") + "+00"


class Timer:
    """Measure elapsed wall-clock seconds around a block.

    The CLI uses it to log how long a simulated run took in real time.

    Parameters
    ----------
    label : str or None, optional
        Descriptive label kept on the timer.
    """

    def __init__(self, label: str | None = None) -> None:
        self.label = label
        self._start_time: float | None = None
        self._end_time: float | None = None

    @property
    def elapsed(self) -> float:
        """Elapsed seconds; ``0.0`` before the block is entered."""
        if self._start_time is None:
            return 0.0
        end_time = self._end_time if self._end_time is not None else time.perf_counter()
        return end_time - self._start_time

    def __enter__(self) -> Timer:
        self._start_time = time.perf_counter()
        self._end_time = None
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc_value: BaseException | None,
        traceback: object | None,
    ) -> bool:
        self._end_time = time.perf_counter()
        return False
