"""
Deterministic future-event list keyed on integer microseconds.
"""

from __future__ import annotations

# =============================================================================
# METADATA
# =============================================================================
__author__ = "Yeremia Gunawan Adhisantoso"
__email__ = "adhisant@tnt.uni-hannover.de"
__license__ = "Clear BSD"

import heapq
import itertools
from typing import Any, Generic, TypeVar

from .errors import ClockError

T = TypeVar("T")


class EventQueue(Generic[T]):
    """Min-heap of ``(due_us, sequence, payload)``.

    Equal due times pop in insertion order. The clock advances to the due time
    of every popped event and never moves backwards.

    Examples
    --------
    >>> q = EventQueue()
    >>> q.schedule(5, "b"); q.schedule(5, "c"); q.schedule(1, "a")
    >>> [q.pop()[1] for _ in range(3)]
    ['a', 'b', 'c']
    >>> q.now
    5
    """

    def __init__(self, start_us: int = 0) -> None:
        self._heap: list[tuple[int, int, Any]] = []
        self._sequence = itertools.count()
        self.now = start_us

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)

    def schedule(self, due_us: int, payload: T) -> None:
        """Add ``payload`` at ``due_us``.

        Raises
        ------
        ClockError
            ``due_us`` lies before the current time.
        """
        if due_us < self.now:
            raise ClockError(f"cannot schedule at {due_us}us, clock is at {self.now}us")
        heapq.heappush(self._heap, (due_us, next(self._sequence), payload))

    def peek_time(self) -> int | None:
        return self._heap[0][0] if self._heap else None

    def pop(self) -> tuple[int, T]:
        """Pop the earliest event and advance the clock to its due time."""
        due_us, _, payload = heapq.heappop(self._heap)
        self.now = due_us
        return due_us, payload

    def advance_to(self, time_us: int) -> None:
        """Move the clock forward without popping (no-op if already past)."""
        if self._heap and self._heap[0][0] < time_us:
            raise ClockError(f"events pending before {time_us}us")
        self.now = max(self.now, time_us)


__all__ = ["EventQueue"]
