"""Deterministic simulator of an SMS-controlled GSM home-automation controller."""

from loguru import logger

from .at_codec import (
    parse_command,
    parse_response,
    render_command,
    render_response,
)
from .config import SimConfig, apply_overrides
from .controller import (
    Action,
    CommandTable,
    Controller,
    LoadBank,
    apply,
    default_table,
    feedback_body,
    match_command,
    step,
)
from .errors import (
    ClockError,
    ConfigError,
    MalformedCommand,
    MalformedResponse,
    ScenarioInvalid,
    SimError,
    StoreFull,
)
from .report import RunReport, accuracy, render_report
from .scenario import Scenario, generate_experiment, parse_scenario
from .uart_link import (
    BrgConfig,
    best_spbrg,
    calculated_baud,
    error_percent,
    link_compatible,
    transfer_duration,
)

__version__ = "0.1.0"

#? Library use stays silent until setup_logging() re-enables the package.
logger.disable(__name__)

_LAZY: dict[str, str] = {
    "run": ".engine",
    "Simulation": ".engine",
    "baud_table": ".baud_table",
    "render_baud_table": ".baud_table",
    "repl": ".repl",
    "setup_logging": ".ext.observability_loguru",
    "type_checked": ".ext.validation_pydantic",
}


def __getattr__(name: str):
    """PEP 562 lazy attribute resolution for the heavier entry points."""
    if name not in _LAZY:
        raise AttributeError(f"module 'smart_gsm_home' has no attribute {name!r}")
    import importlib

    return getattr(importlib.import_module(_LAZY[name], __name__), name)


def __dir__() -> list[str]:
    return sorted(list(globals().keys()) + list(_LAZY.keys()))


__all__ = [
    "parse_command",
    "parse_response",
    "render_command",
    "render_response",
    "SimConfig",
    "apply_overrides",
    "Action",
    "CommandTable",
    "Controller",
    "LoadBank",
    "apply",
    "default_table",
    "feedback_body",
    "match_command",
    "step",
    "SimError",
    "MalformedCommand",
    "MalformedResponse",
    "StoreFull",
    "ClockError",
    "ConfigError",
    "ScenarioInvalid",
    "RunReport",
    "accuracy",
    "render_report",
    "Scenario",
    "generate_experiment",
    "parse_scenario",
    "BrgConfig",
    "best_spbrg",
    "calculated_baud",
    "error_percent",
    "link_compatible",
    "transfer_duration",
    *_LAZY,
]
