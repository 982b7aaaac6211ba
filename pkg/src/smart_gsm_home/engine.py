"""
Discrete-event wiring of phones, network, modem, serial link and controller.

A :class:`Simulation` owns every component and a single
:class:`~smart_gsm_home.scheduler.EventQueue`; it is the only mutator.
:func:`run` executes a scenario on a fresh simulation and returns its
:class:`~smart_gsm_home.report.RunReport`, a pure function of
``(scenario, seed)``.
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
from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

# =============================================================================
# THIRD-PARTY IMPORTS
# =============================================================================
from loguru import logger

# =============================================================================
# LOCAL IMPORTS
# =============================================================================
from .at_codec import is_phone_number, is_sms_text, render_command, render_response
from .config import SimConfig, apply_overrides
from .controller import (
    Action,
    Controller,
    LoadBank,
    StepResult,
    TimerExpiry,
    match_command,
)
from .enums import ActionKind, Direction
from .errors import StoreFull
from .formatting import escape_bytes, format_us
from .gsm_modem import CellularNetwork, GsmModem, ModemReply, NetworkSms
from .report import (
    AssertionResult,
    LatencyStats,
    RunReport,
    TraceEntry,
    accuracy,
)
from .scenario import (
    Assertion,
    ExpectLatency,
    ExpectLoad,
    ExpectSms,
    ExpectStoreUsed,
    Scenario,
    SendSms,
)
from .scheduler import EventQueue
from .uart_link import BrgConfig, SerialFrame, SerialLink


# =============================================================================
# EVENTS
# =============================================================================
@dataclass(frozen=True, slots=True)
class Boot:
    pass


@dataclass(frozen=True, slots=True)
class FrameArrival:
    frame: SerialFrame


@dataclass(frozen=True, slots=True)
class ModemTransmit:
    reply: ModemReply


@dataclass(frozen=True, slots=True)
class ControllerTimer:
    expiry: TimerExpiry


@dataclass(frozen=True, slots=True)
class SmsArrival:
    sms: NetworkSms


@dataclass(frozen=True, slots=True)
class PhoneSend:
    sender: str
    body: str


@dataclass(frozen=True, slots=True)
class Check:
    assertion: Assertion


Event = (
    Boot
    | FrameArrival
    | ModemTransmit
    | ControllerTimer
    | SmsArrival
    | PhoneSend
    | Check
)


# =============================================================================
# BOOKKEEPING
# =============================================================================
@dataclass(frozen=True, slots=True)
class InboxMessage:
    received_us: int
    sender: str
    body: str


@dataclass(slots=True)
class VirtualPhone:
    number: str
    inbox: list[InboxMessage] = field(default_factory=list)
    sent: int = 0


@dataclass(slots=True)
class CommandRecord:
    """Life of one SMS command from the phone to its feedback."""

    message_id: int
    sender: str
    body: str
    sent_us: int
    expected: Action | None
    dropped: bool = False
    store_full: bool = False
    slot: int | None = None
    detected_us: int | None = None
    handled: bool = False
    handled_action: Action | None = None
    actuated_us: int | None = None
    feedback_dispatched: bool = False
    feedback_delivered_us: int | None = None

    @property
    def correct(self) -> bool:
        """Intended effect applied and feedback dispatched, or correctly ignored."""
        if not self.handled:
            return False
        if self.expected is None:
            return self.handled_action is None and not self.feedback_dispatched
        return (
            self.handled_action == self.expected
            and self.actuated_us is not None
            and self.feedback_dispatched
        )

    @property
    def detection_to_actuation_us(self) -> int | None:
        if self.detected_us is None or self.actuated_us is None:
            return None
        return self.actuated_us - self.detected_us

    def touches(self, load_id: int) -> bool:
        action = self.handled_action
        if action is None:
            return False
        if action.kind is ActionKind.SET_LOAD:
            return action.load_id == load_id
        return action.kind in (ActionKind.ALL_ON, ActionKind.ALL_OFF)


# =============================================================================
# SIMULATION
# =============================================================================
class Simulation:
    """A freshly wired stack driven by one event queue.

    Parameters
    ----------
    config : SimConfig, optional
        Validated configuration; defaults reproduce the 20 MHz / SPBRG 32
        operating point against a 9600 baud modem.
    """

    def __init__(self, config: SimConfig | None = None) -> None:
        self.config = config if config is not None else SimConfig()
        cfg = self.config
        self.queue: EventQueue[Event] = EventQueue()
        self.link = SerialLink(
            BrgConfig(fosc_hz=cfg.controller.fosc_hz, spbrg=cfg.controller.spbrg),
            cfg.modem.baud,
        )
        self.network = CellularNetwork(cfg.network, cfg.seed)
        self.network.on_submit = self._on_network_submit
        self.modem = GsmModem(cfg.modem, self.network, cfg.epoch)
        self.controller = Controller(cfg.controller)
        self.phones: dict[str, VirtualPhone] = {}
        self.trace: list[TraceEntry] = []
        self.records: dict[int, CommandRecord] = {}
        self.assertion_results: list[AssertionResult] = []
        self.modem_turnaround_us: list[int] = []
        self._controller_outbox: deque[bytes] = deque()
        self._held_indications: deque[tuple[bytes, CommandRecord | None]] = deque()
        self._commands_in_flight = 0
        self._replies_owed = 0
        self._slot_records: dict[int, CommandRecord] = {}
        self._feedback_records: dict[int, CommandRecord] = {}
        self._current: CommandRecord | None = None
        self.queue.schedule(0, Boot())

    @property
    def now(self) -> int:
        return self.queue.now

    @property
    def loads(self) -> LoadBank:
        return self.controller.loads

    def phone(self, number: str) -> VirtualPhone:
        return self.phones.setdefault(number, VirtualPhone(number))

    # -------------------------------------------------------------------------
    # Stimuli
    # -------------------------------------------------------------------------
    def send_sms(self, sender: str, body: str, at_us: int | None = None) -> None:
        """Queue a phone-originated SMS to the modem at ``at_us`` (default now)."""
        if not is_phone_number(sender):
            raise ValueError(f"{sender!r} is not a phone number")
        if not is_sms_text(body):
            raise ValueError("SMS body must be at most 160 printable ASCII characters")
        self.queue.schedule(max(self.now, at_us or 0), PhoneSend(sender, body))

    def expect(self, assertion: Assertion) -> None:
        self.queue.schedule(assertion.time_us, Check(assertion))

    # -------------------------------------------------------------------------
    # Loop
    # -------------------------------------------------------------------------
    def run_until(self, end_us: int) -> None:
        """Process every event due at or before ``end_us``."""
        while self.queue and self.queue.peek_time() <= end_us:
            _, event = self.queue.pop()
            self._dispatch(event)
        self.queue.advance_to(end_us)

    def run_until_idle(self) -> None:
        """Process events until the queue is empty."""
        while self.queue:
            _, event = self.queue.pop()
            self._dispatch(event)

    def _dispatch(self, event: Event) -> None:
        match event:
            case Boot():
                self._apply_controller(self.controller.boot(self.now))
            case FrameArrival(frame=frame):
                self._on_frame(frame)
            case ModemTransmit(reply=reply):
                self._on_modem_transmit(reply)
            case ControllerTimer(expiry=expiry):
                self._apply_controller(self.controller.step(expiry, self.now))
            case SmsArrival(sms=sms):
                self._on_sms_arrival(sms)
            case PhoneSend(sender=sender, body=body):
                self._on_phone_send(sender, body)
            case Check(assertion=assertion):
                self.assertion_results.append(self._evaluate(assertion))
        self._pump()

    # -------------------------------------------------------------------------
    # Serial side
    # -------------------------------------------------------------------------
    def _write(self, direction: Direction, data: bytes) -> SerialFrame:
        frame = self.link.write(direction, data, self.now)
        self.trace.append(
            TraceEntry(
                emitted_us=frame.emitted_us,
                start_us=frame.start_us,
                delivered_us=frame.delivered_us,
                direction=direction,
                data=escape_bytes(data),
                framing_error=frame.framing_error,
            )
        )
        logger.debug("{} {} @{}us", direction.value, escape_bytes(data), self.now)
        self.queue.schedule(frame.delivered_us, FrameArrival(frame))
        return frame

    def _on_frame(self, frame: SerialFrame) -> None:
        if frame.direction is Direction.TO_MODEM:
            self._commands_in_flight -= 1
            latency = self.modem.response_latency_us
            for reply in self.modem.receive(frame):
                due = max(self.now, reply.command_end_us + latency)
                self.queue.schedule(due, ModemTransmit(reply))
                self._replies_owed += 1
            return
        for result in self.controller.receive(frame, self.now):
            self._apply_controller(result)

    def _on_modem_transmit(self, reply: ModemReply) -> None:
        self._replies_owed -= 1
        wire = b"".join(render_response(r) for r in reply.responses)
        frame = self._write(Direction.TO_CONTROLLER, wire)
        first_byte_us = math.ceil(frame.start_us)
        self.modem_turnaround_us.append(first_byte_us - reply.command_end_us)

    def _pump(self) -> None:
        """Start held transmissions whose line has become free.

        The controller starts a command only while its receiver is quiet. The
        modem holds unsolicited indications while a command is on the wire or
        still owed its reply, so a reply never queues behind one.
        """
        if self._controller_outbox and self.link.idle(
            Direction.TO_CONTROLLER, self.now
        ):
            while self._controller_outbox:
                self._write(Direction.TO_MODEM, self._controller_outbox.popleft())
                self._commands_in_flight += 1
        if (
            self._held_indications
            and self._commands_in_flight == 0
            and self._replies_owed == 0
            and self.link.idle(Direction.TO_CONTROLLER, self.now)
        ):
            data, record = self._held_indications.popleft()
            frame = self._write(Direction.TO_CONTROLLER, data)
            if record is not None:
                record.detected_us = frame.delivered_us

    def _apply_controller(self, result: StepResult) -> None:
        if result.handled is not None:
            record = self._slot_records.pop(result.handled.slot, None)
            self._current = record
            if record is not None:
                record.handled = True
                record.handled_action = result.handled.action
                if result.handled.action is not None:
                    record.actuated_us = self.now
        if result.feedback_dispatched and self._current is not None:
            self._current.feedback_dispatched = True
        for cmd in result.commands:
            self._controller_outbox.append(render_command(cmd))
        if result.timer_generation is not None:
            self.queue.schedule(
                self.now + self.config.controller.response_timeout_us,
                ControllerTimer(TimerExpiry(result.timer_generation)),
            )

    # -------------------------------------------------------------------------
    # Network side
    # -------------------------------------------------------------------------
    def _on_network_submit(self, sms: NetworkSms) -> None:
        if sms.sender == self.modem.number and self._current is not None:
            self._feedback_records[sms.message_id] = self._current
        if not sms.dropped:
            self.queue.schedule(sms.due_us, SmsArrival(sms))

    def _on_phone_send(self, sender: str, body: str) -> None:
        self.phone(sender).sent += 1
        whitelist = self.config.controller.whitelist
        authorized = whitelist is None or sender in whitelist
        expected = match_command(body, self.controller.table) if authorized else None
        sms = self.network.submit(sender, self.modem.number, body, self.now)
        self.records[sms.message_id] = CommandRecord(
            message_id=sms.message_id,
            sender=sender,
            body=body,
            sent_us=self.now,
            expected=expected,
            dropped=sms.dropped,
        )

    def _on_sms_arrival(self, sms: NetworkSms) -> None:
        self.network.complete(sms.message_id)
        if sms.destination != self.modem.number:
            message = InboxMessage(self.now, sms.sender, sms.body)
            self.phone(sms.destination).inbox.append(message)
            record = self._feedback_records.pop(sms.message_id, None)
            if record is not None:
                record.feedback_delivered_us = self.now
            logger.info("Phone {} received {!r}", sms.destination, sms.body)
            return

        record = self.records.get(sms.message_id)
        try:
            slot, indication = self.modem.deliver_inbound(sms, self.now)
        except StoreFull:
            if record is not None:
                record.store_full = True
            return
        if record is not None:
            record.slot = slot
            self._slot_records[slot] = record
        if indication is not None:
            self._held_indications.append((render_response(indication), record))

    # -------------------------------------------------------------------------
    # Assertions
    # -------------------------------------------------------------------------
    def _evaluate(self, assertion: Assertion) -> AssertionResult:
        match assertion:
            case ExpectLoad(load_id=load_id, energized=energized):
                actual = self.loads.is_on(load_id)
                description = f"load {load_id} {'on' if energized else 'off'}"
                passed = actual == energized
                detail = f"load {load_id} is {'on' if actual else 'off'}"
            case ExpectSms(number=number, contains=text):
                inbox = self.phones.get(number, VirtualPhone(number)).inbox
                description = f"sms to {number} contains {text!r}"
                passed = any(text in msg.body for msg in inbox)
                detail = f"{len(inbox)} message(s) in inbox"
            case ExpectLatency(load_id=load_id, bound_us=bound):
                samples = [
                    r.detection_to_actuation_us
                    for r in self.records.values()
                    if r.touches(load_id) and r.detection_to_actuation_us is not None
                ]
                description = f"latency load {load_id} <= {format_us(bound)}"
                passed = bool(samples) and max(samples) <= bound
                if samples:
                    detail = f"worst {format_us(max(samples))}"
                else:
                    detail = "no actuation yet"
            case ExpectStoreUsed(count=count):
                used = self.modem.store.used
                description = f"store used {count}"
                passed = used == count
                detail = f"{used} slot(s) used"
            case _:
                raise TypeError(f"not an assertion: {assertion!r}")
        if not passed:
            logger.warning(
                "Assertion failed at {}: {} ({})",
                format_us(self.now),
                description,
                detail,
            )
        return AssertionResult(
            line=assertion.line,
            time_us=assertion.time_us,
            description=description,
            passed=passed,
            detail=detail,
        )

    # -------------------------------------------------------------------------
    # Report
    # -------------------------------------------------------------------------
    def report(self, name: str = "session") -> RunReport:
        records = list(self.records.values())
        ok = sum(1 for r in records if r.correct)
        detection = [
            r.detection_to_actuation_us
            for r in records
            if r.detection_to_actuation_us is not None
        ]
        round_trip = [
            r.feedback_delivered_us - r.sent_us
            for r in records
            if r.feedback_delivered_us is not None
        ]
        return RunReport(
            name=name,
            seed=self.config.seed,
            passed=all(a.passed for a in self.assertion_results),
            accuracy_pct=accuracy(ok, len(records)),
            commands_sent=len(records),
            commands_ok=ok,
            feedback_delivered=len(round_trip),
            assertions=list(self.assertion_results),
            latencies={
                "detection_to_actuation": LatencyStats.from_samples(detection),
                "round_trip": LatencyStats.from_samples(round_trip),
                "modem_response": LatencyStats.from_samples(self.modem_turnaround_us),
            },
            drops=self.network.drops,
            store_full=self.modem.store_full,
            end_us=self.now,
            trace=list(self.trace),
        )


def build_config(
    scenario: Scenario,
    config: SimConfig | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> SimConfig:
    """Layer defaults < scenario ``set`` lines < ``overrides``."""
    base = config if config is not None else SimConfig()
    merged = apply_overrides(base, scenario.overrides)
    return apply_overrides(merged, overrides or {})


def run(
    scenario: Scenario,
    config: SimConfig | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> RunReport:
    """Execute ``scenario`` against a fresh stack and evaluate its assertions.

    The run ends ``settle_us`` after the last step.

    Raises
    ------
    ConfigError
        The merged configuration is invalid.
    """
    cfg = build_config(scenario, config, overrides)
    sim = Simulation(cfg)
    for step in scenario.steps:
        if isinstance(step, SendSms):
            sim.queue.schedule(step.time_us, PhoneSend(step.sender, step.body))
        else:
            sim.expect(step)
    last = max((step.time_us for step in scenario.steps), default=0)
    logger.info(
        "Running {} with seed {} ({} steps)",
        scenario.name,
        cfg.seed,
        len(scenario.steps),
    )
    sim.run_until(last + cfg.settle_us)
    report = sim.report(scenario.name)
    logger.info(
        "{}: accuracy {:.2f}%, {} drop(s), {}",
        scenario.name,
        report.accuracy_pct,
        report.drops,
        "pass" if report.passed else "FAIL",
    )
    return report


__all__ = [
    "InboxMessage",
    "VirtualPhone",
    "CommandRecord",
    "Simulation",
    "build_config",
    "run",
]
