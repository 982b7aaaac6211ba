"""
Line-oriented scenario files: stimuli, assertions and configuration.

Grammar (one directive per line, ``#`` starts a comment line)::

    at <duration> sms <sender> "<body>"
    at <duration> expect load <id> <on|off>
    at <duration> expect sms to <number> contains "<text>"
    at <duration> expect latency load <id> <= <duration>
    at <duration> expect store used <count>
    set <key> <value>
    set command <KEY> <action>

Durations take ``us``, ``ms`` or ``s`` suffixes. Every problem is reported as
:class:`~smart_gsm_home.errors.ScenarioInvalid` with its line and column.

Examples
--------
>>> sc = parse_scenario('at 0ms sms +601 "L1ON"\\nat 6s expect load 1 on')
>>> [step.kind for step in sc.steps]
['send_sms', 'expect_load']
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
import random
import re
from collections.abc import Callable
from typing import Annotated, Any, Literal

# =============================================================================
# THIRD-PARTY IMPORTS
# =============================================================================
from pydantic import Field, NonNegativeInt

# =============================================================================
# LOCAL IMPORTS
# =============================================================================
from .at_codec import PhoneNumber, SmsBody, is_phone_number, is_sms_text
from .config import SimConfig, apply_overrides
from .controller import LOAD_COUNT, build_table, default_table
from .errors import ConfigError, ScenarioInvalid
from .models import SimBaseModel
from .parsing import parse_duration_us, parse_hz, parse_probability, parse_switch
from .timing import US_PER_S

LoadId = Annotated[int, Field(ge=1, le=LOAD_COUNT)]

DEFAULT_SENDER = "+60123456789"


# =============================================================================
# STEPS
# =============================================================================
class SendSms(SimBaseModel):
    kind: Literal["send_sms"] = "send_sms"
    time_us: NonNegativeInt
    line: int = 0
    sender: PhoneNumber
    body: SmsBody


class ExpectLoad(SimBaseModel):
    kind: Literal["expect_load"] = "expect_load"
    time_us: NonNegativeInt
    line: int = 0
    load_id: LoadId
    energized: bool


class ExpectSms(SimBaseModel):
    kind: Literal["expect_sms"] = "expect_sms"
    time_us: NonNegativeInt
    line: int = 0
    number: PhoneNumber
    contains: str


class ExpectLatency(SimBaseModel):
    kind: Literal["expect_latency"] = "expect_latency"
    time_us: NonNegativeInt
    line: int = 0
    load_id: LoadId
    bound_us: NonNegativeInt


class ExpectStoreUsed(SimBaseModel):
    kind: Literal["expect_store_used"] = "expect_store_used"
    time_us: NonNegativeInt
    line: int = 0
    count: NonNegativeInt


Assertion = ExpectLoad | ExpectSms | ExpectLatency | ExpectStoreUsed
Step = SendSms | Assertion


class Scenario(SimBaseModel):
    """A parsed scenario; ``overrides`` use dotted :class:`SimConfig` keys."""

    name: str = "scenario"
    overrides: dict[str, Any] = Field(default_factory=dict)
    steps: tuple[Step, ...] = ()

    @property
    def stimuli(self) -> list[SendSms]:
        return [step for step in self.steps if isinstance(step, SendSms)]

    @property
    def assertions(self) -> list[Assertion]:
        return [step for step in self.steps if not isinstance(step, SendSms)]


# =============================================================================
# SETTINGS
# =============================================================================
def _parse_whitelist(text: str) -> frozenset[str]:
    numbers = frozenset(part.strip() for part in text.split(",") if part.strip())
    bad = sorted(n for n in numbers if not is_phone_number(n))
    if not numbers or bad:
        raise ValueError(f"invalid whitelist numbers: {', '.join(bad) or text!r}")
    return numbers


def _parse_count(text: str) -> int:
    value = int(text)
    if value < 0:
        raise ValueError(f"{text!r} must not be negative")
    return value


def _parse_phone(text: str) -> str:
    if not is_phone_number(text):
        raise ValueError(f"{text!r} is not a phone number")
    return text


#: ``set`` key -> (dotted config key, value parser)
SETTINGS: dict[str, tuple[str, Callable[[str], Any]]] = {
    "seed": ("seed", int),
    "sms-delay-min": ("network.delay_min_us", parse_duration_us),
    "sms-delay-max": ("network.delay_max_us", parse_duration_us),
    "loss-rate": ("network.loss_rate", parse_probability),
    "sim-capacity": ("modem.capacity", _parse_count),
    "response-latency": ("modem.response_latency_us", parse_duration_us),
    "modem-baud": ("modem.baud", float),
    "home-number": ("modem.home_number", _parse_phone),
    "response-timeout": ("controller.response_timeout_us", parse_duration_us),
    "fosc": ("controller.fosc_hz", parse_hz),
    "spbrg": ("controller.spbrg", _parse_count),
    "whitelist": ("controller.whitelist", _parse_whitelist),
    "settle": ("settle_us", parse_duration_us),
}


# =============================================================================
# PARSER
# =============================================================================
_DURATION = r"\d+(?:\.\d+)?\s*(?:us|ms|s)"
_QUOTED = r'"(?P<{name}>[^"]*)"'

_AT_RE = re.compile(rf"at\s+(?P<time>{_DURATION})\s+(?P<rest>.*)", re.IGNORECASE)
_SET_RE = re.compile(r"set\s+(?P<key>\S+)\s+(?P<value>.+?)\s*", re.IGNORECASE)
_COMMAND_RE = re.compile(r"(?P<key>\S+)\s+(?P<action>.+?)\s*")

_STEP_GRAMMAR: tuple[tuple[str, re.Pattern[str]], ...] = (
    (
        "send_sms",
        re.compile(rf"sms\s+(?P<sender>\S+)\s+{_QUOTED.format(name='body')}\s*"),
    ),
    ("expect_load", re.compile(r"expect\s+load\s+(?P<id>\d+)\s+(?P<switch>\S+)\s*")),
    (
        "expect_sms",
        re.compile(
            rf"expect\s+sms\s+to\s+(?P<number>\S+)\s+contains\s+"
            rf"{_QUOTED.format(name='text')}\s*"
        ),
    ),
    (
        "expect_latency",
        re.compile(
            r"expect\s+latency\s+load\s+(?P<id>\d+)\s*<=\s*"
            rf"(?P<bound>{_DURATION})\s*"
        ),
    ),
    ("expect_store_used", re.compile(r"expect\s+store\s+used\s+(?P<count>\d+)\s*")),
)


def _load_id(match: re.Match[str], line: int, offset: int) -> int:
    load_id = int(match["id"])
    if not 1 <= load_id <= LOAD_COUNT:
        raise ScenarioInvalid(
            f"load id {load_id} outside 1..{LOAD_COUNT}",
            line=line,
            column=offset + match.start("id") + 1,
        )
    return load_id


def _parse_step(
    kind: str, match: re.Match[str], time_us: int, line: int, offset: int
) -> Step:
    def where(group: str) -> int:
        return offset + match.start(group) + 1

    if kind == "send_sms":
        if not is_phone_number(match["sender"]):
            raise ScenarioInvalid(
                f"{match['sender']!r} is not a phone number",
                line=line,
                column=where("sender"),
            )
        if not is_sms_text(match["body"]):
            raise ScenarioInvalid(
                "SMS body must be at most 160 printable ASCII characters",
                line=line,
                column=where("body"),
            )
        return SendSms(
            time_us=time_us, line=line, sender=match["sender"], body=match["body"]
        )
    if kind == "expect_load":
        load_id = _load_id(match, line, offset)
        try:
            energized = parse_switch(match["switch"])
        except ValueError as exc:
            raise ScenarioInvalid(str(exc), line=line, column=where("switch")) from None
        return ExpectLoad(
            time_us=time_us, line=line, load_id=load_id, energized=energized
        )
    if kind == "expect_sms":
        if not is_phone_number(match["number"]):
            raise ScenarioInvalid(
                f"{match['number']!r} is not a phone number",
                line=line,
                column=where("number"),
            )
        return ExpectSms(
            time_us=time_us,
            line=line,
            number=match["number"],
            contains=match["text"],
        )
    if kind == "expect_latency":
        load_id = _load_id(match, line, offset)
        bound = parse_duration_us(match["bound"])
        return ExpectLatency(
            time_us=time_us, line=line, load_id=load_id, bound_us=bound
        )
    return ExpectStoreUsed(time_us=time_us, line=line, count=int(match["count"]))


def _parse_set(
    match: re.Match[str],
    overrides: dict[str, Any],
    commands: dict[str, str],
    line: int,
    offset: int,
) -> None:
    key = match["key"].lower()
    value_column = offset + match.start("value") + 1
    if key == "command":
        entry = _COMMAND_RE.fullmatch(match["value"])
        if entry is None:
            raise ScenarioInvalid(
                "expected 'set command <KEY> <action>'", line=line, column=value_column
            )
        commands[entry["key"]] = entry["action"]
        try:
            build_table(commands)
        except ConfigError as exc:
            raise ScenarioInvalid(exc.message, line=line, column=value_column) from None
        overrides["controller.extra_commands"] = dict(commands)
        return

    setting = SETTINGS.get(key)
    if setting is None:
        raise ScenarioInvalid(
            f"unknown setting {match['key']!r}",
            line=line,
            column=offset + match.start("key") + 1,
        )
    target, parser = setting
    try:
        value = parser(match["value"])
    except ValueError as exc:
        raise ScenarioInvalid(str(exc), line=line, column=value_column) from None
    candidate = {**overrides, target: value}
    try:
        apply_overrides(SimConfig(), candidate)
    except ConfigError as exc:
        raise ScenarioInvalid(exc.message, line=line, column=value_column) from None
    overrides[target] = value


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    """Parse scenario text into a :class:`Scenario`.

    Unknown directives are errors. ``set`` values are validated against
    :class:`~smart_gsm_home.config.SimConfig` as they are read.

    Raises
    ------
    ScenarioInvalid
        With the 1-based line and column of the first problem.
    """
    overrides: dict[str, Any] = {}
    commands: dict[str, str] = {}
    steps: list[Step] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        offset = len(raw) - len(raw.lstrip())

        set_match = _SET_RE.fullmatch(stripped)
        if set_match is not None:
            _parse_set(set_match, overrides, commands, lineno, offset)
            continue

        at_match = _AT_RE.fullmatch(stripped)
        if at_match is None:
            raise ScenarioInvalid(
                f"unknown directive {stripped.split()[0]!r}",
                line=lineno,
                column=offset + 1,
            )
        time_us = parse_duration_us(at_match["time"])
        rest_offset = offset + at_match.start("rest")
        for kind, pattern in _STEP_GRAMMAR:
            step_match = pattern.fullmatch(at_match["rest"])
            if step_match is not None:
                step = _parse_step(kind, step_match, time_us, lineno, rest_offset)
                steps.append(step)
                break
        else:
            raise ScenarioInvalid(
                f"cannot parse {at_match['rest']!r}",
                line=lineno,
                column=rest_offset + 1,
            )

    return Scenario(name=name, overrides=overrides, steps=tuple(steps))


# =============================================================================
# EXPERIMENT GENERATOR
# =============================================================================
def generate_experiment(
    seed: int,
    commands: int = 200,
    *,
    loss_rate: float = 0.0,
    delay_min_us: int = 1 * US_PER_S,
    delay_max_us: int = 2_500_000,
    spacing_us: int = 3 * US_PER_S,
    sender: str = DEFAULT_SENDER,
) -> Scenario:
    """Build the randomised accuracy experiment as a scenario.

    ``commands`` valid SMS commands drawn from the default table (status
    queries excluded) are sent ``spacing_us`` apart; the run ends by checking
    that every processed message was deleted from the SIM.
    """
    if commands < 0:
        raise ValueError("commands must not be negative")
    rng = random.Random(seed)
    keys = [key for key in default_table().keys() if key != "STATUS"]
    steps: list[Step] = [
        SendSms(time_us=i * spacing_us, sender=sender, body=rng.choice(keys))
        for i in range(commands)
    ]
    end_us = commands * spacing_us + 10 * US_PER_S
    steps.append(ExpectStoreUsed(time_us=end_us, count=0))
    overrides = {
        "seed": seed,
        "network.loss_rate": loss_rate,
        "network.delay_min_us": delay_min_us,
        "network.delay_max_us": delay_max_us,
    }
    return Scenario(name=f"experiment-{seed}", overrides=overrides, steps=tuple(steps))


__all__ = [
    "SendSms",
    "ExpectLoad",
    "ExpectSms",
    "ExpectLatency",
    "ExpectStoreUsed",
    "Assertion",
    "Step",
    "Scenario",
    "SETTINGS",
    "parse_scenario",
    "generate_experiment",
]
