"""
Home controller firmware: modem bring-up, SMS command matching and relays.

The firmware loop is modelled as a pure transition function :func:`step`
over a :class:`ControllerFsm`. It never reads a clock; the event loop passes
``now_us`` in and arms the response timer the result asks for.

Normal cycle::

    PowerOn -> AT -> Handshake -> AT+CMGF=1 -> SetMode -> Idle
    Idle --+CMTI n--> AT+CMGR=n -> Reading --content--> Executing --OK-->
        matched:   AT+CMGS -> Feedback -> body^Z -> +CMGS/OK -> AT+CMGD=n
        unmatched: AT+CMGD=n
    -> Deleting --OK--> Idle
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
import re
from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Annotated, NamedTuple

# =============================================================================
# THIRD-PARTY IMPORTS
# =============================================================================
from loguru import logger
from pydantic import Field, model_validator

# =============================================================================
# LOCAL IMPORTS
# =============================================================================
from .at_codec import (
    AtCommand,
    AtResponse,
    Attention,
    CmsError,
    DeleteMessage,
    Error,
    MessageContent,
    NewMessageIndication,
    Ok,
    ReadMessage,
    SendBody,
    SendMessage,
    SendPrompt,
    SentAck,
    SetTextMode,
    frame_responses,
    parse_response,
)
from .config import ControllerConfig
from .enums import ActionKind, ControllerState
from .errors import ConfigError, MalformedResponse
from .formatting import escape_bytes
from .models import SimBaseModel
from .parsing import parse_switch
from .uart_link import SerialFrame

# =============================================================================
# CONSTANTS
# =============================================================================
LOAD_COUNT = 4
MIN_KEY_LENGTH = 4
MAX_KEY_LENGTH = 6
_KEY_RE = re.compile(r"[A-Z0-9]+")

_BUSY_BOOT_STATES = frozenset({ControllerState.HANDSHAKE, ControllerState.SET_MODE})


# =============================================================================
# LOADS
# =============================================================================
@dataclass(slots=True)
class Load:
    load_id: int
    label: str
    energized: bool = False


class LoadChange(NamedTuple):
    time_us: int
    load_id: int
    energized: bool
    provenance: str


class LoadBank:
    """Four relay-driven loads; relays are normally open, energised = load on."""

    def __init__(self, labels: Iterable[str] | None = None) -> None:
        names = list(labels) if labels is not None else [
            f"Load {i}" for i in range(1, LOAD_COUNT + 1)
        ]
        if len(names) != LOAD_COUNT:
            raise ValueError(f"a load bank has exactly {LOAD_COUNT} loads")
        self.loads = [Load(i, name) for i, name in enumerate(names, start=1)]
        self.change_log: list[LoadChange] = []

    def __getitem__(self, load_id: int) -> Load:
        if not 1 <= load_id <= LOAD_COUNT:
            raise KeyError(load_id)
        return self.loads[load_id - 1]

    def is_on(self, load_id: int) -> bool:
        return self[load_id].energized

    def states(self) -> tuple[bool, ...]:
        return tuple(load.energized for load in self.loads)

    def set(
        self, load_id: int, energized: bool, now_us: int, provenance: str
    ) -> LoadChange:
        """Drive one relay and log the change, even when the state is unchanged."""
        self[load_id].energized = energized
        change = LoadChange(now_us, load_id, energized, provenance)
        self.change_log.append(change)
        return change


# =============================================================================
# COMMAND TABLE
# =============================================================================
class Action(SimBaseModel):
    """What a matched SMS command does to the load bank."""

    kind: ActionKind
    load_id: Annotated[int, Field(ge=1, le=LOAD_COUNT)] | None = None
    energized: bool | None = None

    @model_validator(mode="after")
    def _check_shape(self) -> Action:
        is_set = self.kind is ActionKind.SET_LOAD
        has_fields = self.load_id is not None and self.energized is not None
        if is_set and not has_fields:
            raise ValueError("set_load needs load_id and energized")
        if not is_set and (self.load_id is not None or self.energized is not None):
            raise ValueError(f"{self.kind.value} takes no load_id or energized")
        return self

    @classmethod
    def set_load(cls, load_id: int, energized: bool) -> Action:
        return cls(kind=ActionKind.SET_LOAD, load_id=load_id, energized=energized)

    @classmethod
    def all_on(cls) -> Action:
        return cls(kind=ActionKind.ALL_ON)

    @classmethod
    def all_off(cls) -> Action:
        return cls(kind=ActionKind.ALL_OFF)

    @classmethod
    def status(cls) -> Action:
        return cls(kind=ActionKind.STATUS)

    def __str__(self) -> str:
        match self.kind:
            case ActionKind.SET_LOAD:
                return f"load {self.load_id} {'on' if self.energized else 'off'}"
            case ActionKind.ALL_ON:
                return "all on"
            case ActionKind.ALL_OFF:
                return "all off"
            case _:
                return "status"


_ACTION_RE = re.compile(
    r"\s*(?:(?P<load>load)\s+(?P<id>\d+)\s+(?P<switch>\S+)"
    r"|(?P<all>all)\s+(?P<all_switch>\S+)"
    r"|(?P<status>status))\s*",
    re.IGNORECASE,
)


def parse_action(text: str) -> Action:
    """Parse ``"load <id> <on|off>"``, ``"all <on|off>"`` or ``"status"``.

    Raises
    ------
    ValueError
        Unknown wording, bad switch value or load id outside 1..4.
    """
    match = _ACTION_RE.fullmatch(text)
    if match is None:
        raise ValueError(f"unknown action {text!r}")
    if match["status"]:
        return Action.status()
    if match["all"]:
        on = parse_switch(match["all_switch"])
        return Action.all_on() if on else Action.all_off()
    load_id = int(match["id"])
    if not 1 <= load_id <= LOAD_COUNT:
        raise ValueError(f"load id {load_id} outside 1..{LOAD_COUNT}")
    return Action.set_load(load_id, parse_switch(match["switch"]))


def normalize_command(text: str) -> str:
    return text.strip().upper()


class CommandTable:
    """Mapping of normalised SMS text to :class:`Action`.

    Keys are 4 to 6 upper-case alphanumerics after trim + uppercase.
    """

    def __init__(self, entries: Mapping[str, Action] | None = None) -> None:
        self._entries: dict[str, Action] = {}
        for key, action in (entries or {}).items():
            self.add(key, action)

    def add(self, key: str, action: Action) -> None:
        """Register ``key``; raises ``ValueError`` on bad shape or duplicate."""
        norm = normalize_command(key)
        if not MIN_KEY_LENGTH <= len(norm) <= MAX_KEY_LENGTH:
            raise ValueError(
                f"command {norm!r} must be {MIN_KEY_LENGTH}-{MAX_KEY_LENGTH} characters"
            )
        if _KEY_RE.fullmatch(norm) is None:
            raise ValueError(f"command {norm!r} must be letters and digits only")
        if norm in self._entries:
            raise ValueError(f"duplicate command {norm!r}")
        self._entries[norm] = action

    def lookup(self, body: str) -> Action | None:
        return self._entries.get(normalize_command(body))

    def keys(self) -> list[str]:
        return list(self._entries)

    def items(self) -> list[tuple[str, Action]]:
        return list(self._entries.items())

    def __contains__(self, body: object) -> bool:
        return isinstance(body, str) and normalize_command(body) in self._entries

    def __len__(self) -> int:
        return len(self._entries)


def default_table() -> CommandTable:
    """``L1ON``/``L1OFF`` .. ``L4ON``/``L4OFF``, ``ALLON``, ``ALLOFF``, ``STATUS``."""
    table = CommandTable()
    for load_id in range(1, LOAD_COUNT + 1):
        table.add(f"L{load_id}ON", Action.set_load(load_id, True))
        table.add(f"L{load_id}OFF", Action.set_load(load_id, False))
    table.add("ALLON", Action.all_on())
    table.add("ALLOFF", Action.all_off())
    table.add("STATUS", Action.status())
    return table


def build_table(extra: Mapping[str, str] | None = None) -> CommandTable:
    """Default table plus ``KEY -> action text`` entries.

    Raises
    ------
    ConfigError
        An extra entry is malformed or duplicates an existing key.
    """
    table = default_table()
    for key, action_text in (extra or {}).items():
        try:
            table.add(key, parse_action(action_text))
        except ValueError as exc:
            raise ConfigError(f"command {key!r}: {exc}") from None
    return table


def match_command(body: str, table: CommandTable) -> Action | None:
    return table.lookup(body)


def apply(
    action: Action, loads: LoadBank, now_us: int, provenance: str = ""
) -> list[LoadChange]:
    """Apply ``action`` to ``loads`` and return the appended log entries."""
    match action.kind:
        case ActionKind.SET_LOAD:
            return [loads.set(action.load_id, action.energized, now_us, provenance)]
        case ActionKind.ALL_ON | ActionKind.ALL_OFF:
            energized = action.kind is ActionKind.ALL_ON
            return [
                loads.set(load.load_id, energized, now_us, provenance)
                for load in loads.loads
            ]
        case _:
            return []


def feedback_body(loads: LoadBank) -> str:
    """Status text, e.g. ``"L1:ON L2:OFF L3:OFF L4:OFF"``."""
    return " ".join(
        f"L{load.load_id}:{'ON' if load.energized else 'OFF'}" for load in loads.loads
    )


# =============================================================================
# STATE MACHINE
# =============================================================================
class TimerExpiry(NamedTuple):
    """Response timer; only the one carrying the current generation counts."""

    generation: int


class MalformedEvent(NamedTuple):
    """A response block that could not be parsed, or a framing error."""

    raw: bytes
    reason: str


ControllerEvent = AtResponse | TimerExpiry | MalformedEvent


class HandledMessage(NamedTuple):
    slot: int
    sender: str
    body: str
    authorized: bool
    action: Action | None


@dataclass(slots=True)
class ControllerFsm:
    state: ControllerState = ControllerState.POWER_ON
    slot: int | None = None
    whitelist: frozenset[str] | None = None
    last_sender: str | None = None
    matched: Action | None = None
    #? Next reply expected in Feedback: "prompt", "ack" or "ok".
    feedback_phase: str | None = None
    pending: deque[int] = field(default_factory=deque)
    generation: int = 0


@dataclass(slots=True)
class StepResult:
    commands: list[AtCommand] = field(default_factory=list)
    changes: list[LoadChange] = field(default_factory=list)
    #? Generation of the response timer to arm, or None to arm nothing.
    timer_generation: int | None = None
    handled: HandledMessage | None = None
    feedback_dispatched: bool = False
    failed: bool = False


def _emit(
    result: StepResult, fsm: ControllerFsm, cmd: AtCommand, state: ControllerState
) -> None:
    fsm.generation += 1
    fsm.state = state
    result.commands.append(cmd)
    result.timer_generation = fsm.generation


def _enter_idle(result: StepResult, fsm: ControllerFsm) -> None:
    fsm.generation += 1
    fsm.state = ControllerState.IDLE
    fsm.slot = None
    fsm.matched = None
    fsm.feedback_phase = None
    result.timer_generation = None
    if fsm.pending:
        fsm.slot = fsm.pending.popleft()
        _emit(result, fsm, ReadMessage(index=fsm.slot), ControllerState.READING)


def _fail_safe(result: StepResult, fsm: ControllerFsm, why: str) -> None:
    logger.warning(
        "Controller {} (slot {}): {}; back to idle", fsm.state.value, fsm.slot, why
    )
    result.failed = True
    _enter_idle(result, fsm)


def _on_message(
    event: MessageContent,
    fsm: ControllerFsm,
    loads: LoadBank,
    table: CommandTable,
    now_us: int,
    result: StepResult,
) -> None:
    authorized = fsm.whitelist is None or event.sender in fsm.whitelist
    action = match_command(event.body, table) if authorized else None
    if not authorized:
        logger.warning("SMS from {} not whitelisted; ignored", event.sender)
    elif action is None:
        logger.info("SMS {!r} from {} matches no command", event.body, event.sender)
    else:
        key = normalize_command(event.body)
        provenance = f"{key} from {event.sender} (slot {fsm.slot})"
        result.changes = apply(action, loads, now_us, provenance)
        logger.info("Command {} -> {} at {}us", key, action, now_us)
    fsm.last_sender = event.sender
    fsm.matched = action
    fsm.state = ControllerState.EXECUTING
    result.handled = HandledMessage(
        fsm.slot, event.sender, event.body, authorized, action
    )


def step(
    event: ControllerEvent,
    fsm: ControllerFsm,
    loads: LoadBank,
    table: CommandTable,
    now_us: int,
) -> StepResult:
    """Advance the firmware by one event.

    Parameters
    ----------
    event : AtResponse | TimerExpiry | MalformedEvent
        Next parsed modem response, timer expiry or unparseable block.
    fsm : ControllerFsm
        Updated in place.
    loads : LoadBank
        Updated in place; only a matched ``MessageContent`` changes it.
    table : CommandTable
        Command vocabulary.
    now_us : int
        Simulated time of the event, used to stamp relay changes.

    Returns
    -------
    StepResult
        Commands to send, relay changes, and the timer to arm.
    """
    result = StepResult()
    state = fsm.state

    if isinstance(event, TimerExpiry):
        if event.generation != fsm.generation or state is ControllerState.IDLE:
            return result
        if state is ControllerState.POWER_ON:
            _emit(result, fsm, Attention(), ControllerState.HANDSHAKE)
        elif state in _BUSY_BOOT_STATES:
            logger.warning("Modem silent during {}; retrying AT", state.value)
            _emit(result, fsm, Attention(), ControllerState.HANDSHAKE)
        else:
            _fail_safe(result, fsm, "response timeout")
        return result

    if isinstance(event, NewMessageIndication):
        if state is ControllerState.IDLE:
            fsm.slot = event.index
            _emit(result, fsm, ReadMessage(index=event.index), ControllerState.READING)
        elif event.index not in fsm.pending:
            fsm.pending.append(event.index)
        return result

    if state in (ControllerState.IDLE, ControllerState.POWER_ON):
        logger.debug("Ignoring {} while {}", type(event).__name__, state.value)
        return result

    if isinstance(event, MalformedEvent):
        _fail_safe(result, fsm, f"malformed response ({event.reason})")
        return result
    if isinstance(event, Error | CmsError):
        _fail_safe(result, fsm, f"modem replied {event.kind}")
        return result

    match state, event:
        case ControllerState.HANDSHAKE, Ok():
            _emit(result, fsm, SetTextMode(enabled=True), ControllerState.SET_MODE)
        case ControllerState.SET_MODE, Ok():
            logger.info("Modem ready in text mode")
            _enter_idle(result, fsm)
        case ControllerState.READING, MessageContent():
            _on_message(event, fsm, loads, table, now_us, result)
        case ControllerState.EXECUTING, Ok():
            if fsm.matched is not None:
                fsm.feedback_phase = "prompt"
                cmd = SendMessage(recipient=fsm.last_sender)
                _emit(result, fsm, cmd, ControllerState.FEEDBACK)
            else:
                cmd = DeleteMessage(index=fsm.slot)
                _emit(result, fsm, cmd, ControllerState.DELETING)
        case ControllerState.FEEDBACK, SendPrompt() if fsm.feedback_phase == "prompt":
            fsm.feedback_phase = "ack"
            cmd = SendBody(body=feedback_body(loads))
            _emit(result, fsm, cmd, ControllerState.FEEDBACK)
        case ControllerState.FEEDBACK, SentAck() if fsm.feedback_phase == "ack":
            fsm.feedback_phase = "ok"
            result.feedback_dispatched = True
        case ControllerState.FEEDBACK, Ok() if fsm.feedback_phase == "ok":
            fsm.feedback_phase = None
            _emit(result, fsm, DeleteMessage(index=fsm.slot), ControllerState.DELETING)
        case ControllerState.DELETING, Ok():
            _enter_idle(result, fsm)
        case _:
            _fail_safe(result, fsm, f"unexpected {event.kind}")
    return result


# =============================================================================
# FIRMWARE WRAPPER
# =============================================================================
class Controller:
    """Controller firmware with its receive buffer, bound to one load bank."""

    def __init__(
        self,
        config: ControllerConfig,
        table: CommandTable | None = None,
        loads: LoadBank | None = None,
    ) -> None:
        self.config = config
        self.table = table if table is not None else build_table(config.extra_commands)
        self.loads = loads if loads is not None else LoadBank()
        self.fsm = ControllerFsm(whitelist=config.whitelist)
        self._buffer = b""

    @property
    def state(self) -> ControllerState:
        return self.fsm.state

    def boot(self, now_us: int) -> StepResult:
        return self.step(TimerExpiry(self.fsm.generation), now_us)

    def step(self, event: ControllerEvent, now_us: int) -> StepResult:
        before = self.fsm.state
        result = step(event, self.fsm, self.loads, self.table, now_us)
        if self.fsm.state is not before:
            logger.debug(
                "FSM {} -> {} on {}",
                before.value,
                self.fsm.state.value,
                type(event).__name__,
            )
        return result

    def receive(self, frame: SerialFrame, now_us: int) -> list[StepResult]:
        """Frame and parse modem bytes, stepping once per complete block."""
        if frame.framing_error:
            self._buffer = b""
            return [self.step(MalformedEvent(b"", "framing error"), now_us)]

        blocks, self._buffer = frame_responses(self._buffer + frame.data)
        results = []
        for block in blocks:
            try:
                event: ControllerEvent = parse_response(block)
            except MalformedResponse as exc:
                logger.debug(
                    "Malformed response {}: {}", escape_bytes(block), exc.message
                )
                event = MalformedEvent(block, exc.message)
            results.append(self.step(event, now_us))
        return results


__all__ = [
    "LOAD_COUNT",
    "Load",
    "LoadChange",
    "LoadBank",
    "Action",
    "parse_action",
    "CommandTable",
    "default_table",
    "build_table",
    "match_command",
    "apply",
    "feedback_body",
    "TimerExpiry",
    "MalformedEvent",
    "HandledMessage",
    "ControllerFsm",
    "StepResult",
    "step",
    "Controller",
]
