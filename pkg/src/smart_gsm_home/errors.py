"""
Exception hierarchy for the simulator.

Every error raised by the package derives from :class:`SimError`, which keeps
a ``component`` tag and exposes :meth:`SimError.to_dict` so the CLI and reports
can surface failures as JSON without exception internals.

Protocol-level errors (:class:`MalformedCommand`, :class:`MalformedResponse`,
:class:`StoreFull`) never escape a running simulation; the modem and the
controller translate them into ``ERROR`` replies and fail-safe transitions.
"""

from __future__ import annotations

# =============================================================================
# METADATA
# =============================================================================
__author__ = "Yeremia Gunawan Adhisantoso"
__email__ = "adhisant@tnt.uni-hannover.de"
__license__ = "Clear BSD"

from typing import Any


class SimError(Exception):
    """Base class for all simulator failures.

    Parameters
    ----------
    message : str
        Human-readable error description.
    component : str
        Subsystem that raised the error (e.g. ``"at_codec"``).
    """

    component: str = "sim"

    def __init__(self, message: str, *, component: str | None = None) -> None:
        super().__init__(message)
        self.message = message
        if component is not None:
            self.component = component

    def to_dict(self) -> dict[str, Any]:
        return {
            "error": self.message,
            "component": self.component,
            "error_type": type(self).__name__,
        }


class MalformedCommand(SimError):
    """Bytes received by the modem are not one of the accepted AT commands."""

    component = "at_codec"


class MalformedResponse(SimError):
    """Bytes received by the controller are not a well-formed modem response."""

    component = "at_codec"


class StoreFull(SimError):
    """The SIM message store has no free slot for an incoming SMS."""

    component = "gsm_modem"


class ClockError(SimError):
    """An event was scheduled before the current simulated time."""

    component = "scheduler"


class ConfigError(SimError):
    """A configuration value failed validation."""

    component = "config"


class ScenarioInvalid(SimError):
    """A scenario file failed validation.

    Parameters
    ----------
    message : str
        What is wrong with the scenario.
    line, column : int
        1-based location of the offending text.
    """

    component = "scenario"

    def __init__(self, message: str, *, line: int, column: int = 1) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.reason = message
        self.line = line
        self.column = column

    def to_dict(self) -> dict[str, Any]:
        payload = super().to_dict()
        payload.update({"line": self.line, "column": self.column})
        return payload


__all__ = [
    "SimError",
    "MalformedCommand",
    "MalformedResponse",
    "StoreFull",
    "ClockError",
    "ConfigError",
    "ScenarioInvalid",
]
