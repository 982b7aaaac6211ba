"""
GSM modem emulation: text-mode AT interpreter, SIM message store and the
cellular network between virtual phones and the modem.

The modem is a passive state machine. The event loop feeds it serial frames
(:meth:`GsmModem.receive`) and network arrivals
(:meth:`GsmModem.deliver_inbound`) and schedules the replies it returns.
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
import datetime as dt
import math
import random
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Annotated

# =============================================================================
# THIRD-PARTY IMPORTS
# =============================================================================
from loguru import logger
from pydantic import Field, NonNegativeInt

# =============================================================================
# LOCAL IMPORTS
# =============================================================================
from .at_codec import (
    CR,
    CTRL_Z,
    MAX_FRAME_LENGTH,
    AtCommand,
    AtResponse,
    Attention,
    CmsError,
    ConfigIndication,
    DeleteMessage,
    Error,
    MessageContent,
    NewMessageIndication,
    Ok,
    PhoneNumber,
    ReadMessage,
    SendBody,
    SendMessage,
    SendPrompt,
    SentAck,
    SetTextMode,
    SmsBody,
    SmsMessage,
    parse_command,
)
from .config import ModemConfig, NetworkConfig
from .enums import MessageStatus
from .errors import MalformedCommand, StoreFull
from .formatting import escape_bytes
from .models import SimBaseModel
from .timing import DEFAULT_EPOCH, gsm_timestamp
from .uart_link import SerialFrame

# =============================================================================
# CONSTANTS
# =============================================================================
# ? GSM 07.05 "invalid memory index".
CMS_INVALID_INDEX = 321
_LF = 0x0A


# =============================================================================
# SIM STORE
# =============================================================================
@dataclass(slots=True)
class SimStore:
    """Fixed-size SIM message store with slots ``1..capacity``."""

    capacity: int = 10
    slots: dict[int, SmsMessage | None] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.slots:
            self.slots = {index: None for index in range(1, self.capacity + 1)}

    @property
    def used(self) -> int:
        return sum(1 for msg in self.slots.values() if msg is not None)

    def occupied(self) -> list[int]:
        return [index for index, msg in self.slots.items() if msg is not None]

    def get(self, index: int) -> SmsMessage | None:
        return self.slots.get(index)

    def store(self, sender: str, body: str, timestamp_us: int) -> SmsMessage:
        """Put a message into the lowest free slot.

        Raises
        ------
        StoreFull
            Every slot is occupied.
        """
        for index, current in self.slots.items():
            if current is None:
                msg = SmsMessage(
                    index=index, sender=sender, timestamp_us=timestamp_us, body=body
                )
                self.slots[index] = msg
                return msg
        raise StoreFull(f"all {self.capacity} SIM slots are occupied")

    def mark_read(self, index: int) -> None:
        msg = self.slots.get(index)
        if msg is not None and not msg.read:
            self.slots[index] = msg.model_copy(update={"read": True})

    def delete(self, index: int) -> bool:
        """Empty slot ``index``; return whether it held a message."""
        if self.slots.get(index) is None:
            return False
        self.slots[index] = None
        return True


@dataclass(slots=True)
class ModemState:
    text_mode: bool = False
    indication_mode: bool = True
    #? Recipient of a +CMGS whose Ctrl-Z terminated body has not arrived yet.
    awaiting_body_for: str | None = None
    response_latency_us: int = 300


# =============================================================================
# CELLULAR NETWORK
# =============================================================================
class NetworkSms(SimBaseModel):
    """One SMS travelling through the cellular network."""

    message_id: NonNegativeInt
    sender: PhoneNumber
    destination: PhoneNumber
    body: SmsBody
    submitted_us: NonNegativeInt
    due_us: NonNegativeInt
    dropped: bool = False
    #? Free correlation tag, used by the engine to follow a command.
    tag: Annotated[int, Field(ge=0)] | None = None


class CellularNetwork:
    """Delay-and-loss model of the SMS path.

    Each submission draws its delay first and its loss roll second from one
    seeded ``random.Random``, so a seed fixes every delivery time and drop.

    Parameters
    ----------
    config : NetworkConfig
        Delay bounds (max already clamped to 3 s) and loss probability.
    seed : int
        Seed of the private random stream.
    """

    def __init__(self, config: NetworkConfig, seed: int) -> None:
        self.config = config
        self._rng = random.Random(seed)
        self._next_id = 1
        self.in_flight: dict[int, NetworkSms] = {}
        self.drops = 0
        self.delivered = 0
        self.on_submit: Callable[[NetworkSms], None] | None = None

    def sample_delay(self) -> int:
        return self._rng.randint(self.config.delay_min_us, self.config.delay_max_us)

    def submit(
        self,
        sender: str,
        destination: str,
        body: str,
        now_us: int,
        *,
        tag: int | None = None,
    ) -> NetworkSms:
        """Hand an SMS to the network; it is due ``now + delay`` unless dropped."""
        delay = self.sample_delay()
        dropped = self._rng.random() < self.config.loss_rate
        sms = NetworkSms(
            message_id=self._next_id,
            sender=sender,
            destination=destination,
            body=body,
            submitted_us=now_us,
            due_us=now_us + delay,
            dropped=dropped,
            tag=tag,
        )
        self._next_id += 1
        if dropped:
            self.drops += 1
            logger.warning(
                "Network dropped SMS #{} {} -> {}", sms.message_id, sender, destination
            )
        else:
            self.in_flight[sms.message_id] = sms
            logger.debug(
                "SMS #{} {} -> {} due at {}us",
                sms.message_id,
                sender,
                destination,
                sms.due_us,
            )
        if self.on_submit is not None:
            self.on_submit(sms)
        return sms

    def complete(self, message_id: int) -> NetworkSms:
        """Remove a due message from ``in_flight`` and count it delivered."""
        sms = self.in_flight.pop(message_id)
        self.delivered += 1
        return sms


# =============================================================================
# MODEM
# =============================================================================
@dataclass(frozen=True, slots=True)
class ModemReply:
    """Responses to one command, due ``response_latency`` after ``command_end_us``."""

    responses: tuple[AtResponse, ...]
    command_end_us: int
    command: AtCommand | None = None


class GsmModem:
    """Text-mode AT interpreter in front of a :class:`SimStore`.

    Parameters
    ----------
    config : ModemConfig
        Store capacity, response latency and the modem's own number.
    network : CellularNetwork
        Where ``+CMGS`` messages are submitted.
    epoch : datetime, optional
        Wall-clock time of simulated ``t = 0`` for ``+CMGR`` timestamps.
    """

    def __init__(
        self,
        config: ModemConfig,
        network: CellularNetwork,
        epoch: dt.datetime = DEFAULT_EPOCH,
    ) -> None:
        self.config = config
        self.number = config.home_number
        self.network = network
        self.epoch = epoch
        self.state = ModemState(response_latency_us=config.response_latency_us)
        self.store = SimStore(capacity=config.capacity)
        self.store_full = 0
        self._line = bytearray()
        self._next_reference = 0
        self._dispatch: dict[type, Callable[[AtCommand, int], list[AtResponse]]] = {
            Attention: self._on_attention,
            SetTextMode: self._on_set_text_mode,
            ConfigIndication: self._on_config_indication,
            ReadMessage: self._on_read,
            DeleteMessage: self._on_delete,
            SendMessage: self._on_send,
            SendBody: self._on_body,
        }

    @property
    def response_latency_us(self) -> int:
        return self.state.response_latency_us

    # -------------------------------------------------------------------------
    # Serial side
    # -------------------------------------------------------------------------
    def receive(self, frame: SerialFrame) -> list[ModemReply]:
        """Consume a frame from the controller and execute every completed line."""
        if frame.framing_error:
            if self._line:
                logger.debug(
                    "Framing error; discarding partial line {}", bytes(self._line)
                )
            self._line.clear()
            return []

        replies: list[ModemReply] = []
        for position, byte in enumerate(frame.data):
            if byte == _LF and not self._line:
                continue
            self._line.append(byte)
            if byte not in (CR[0], CTRL_Z[0]):
                if len(self._line) > MAX_FRAME_LENGTH:
                    logger.warning(
                        "Command line overflow; {} bytes dropped", len(self._line)
                    )
                    self._line.clear()
                    end = math.ceil(frame.byte_arrival_us(position))
                    replies.append(ModemReply((Error(),), end))
                continue
            line = bytes(self._line)
            self._line.clear()
            end = math.ceil(frame.byte_arrival_us(position))
            replies.append(self._handle_line(line, end))
        return replies

    def _handle_line(self, line: bytes, end_us: int) -> ModemReply:
        try:
            cmd = parse_command(line)
        except MalformedCommand as exc:
            logger.debug("Malformed command {}: {}", escape_bytes(line), exc.message)
            self.state.awaiting_body_for = None
            return ModemReply((Error(),), end_us)
        return ModemReply(tuple(self.execute(cmd, end_us)), end_us, cmd)

    def execute(self, cmd: AtCommand, now_us: int) -> list[AtResponse]:
        """Run one parsed command and return its responses in order."""
        if self.state.awaiting_body_for is not None and not isinstance(cmd, SendBody):
            logger.debug("Send aborted by {}", cmd.kind)
            self.state.awaiting_body_for = None
            return [Error()]
        return self._dispatch[type(cmd)](cmd, now_us)

    def _on_attention(self, cmd: AtCommand, now_us: int) -> list[AtResponse]:
        return [Ok()]

    def _on_set_text_mode(self, cmd: SetTextMode, now_us: int) -> list[AtResponse]:
        self.state.text_mode = cmd.enabled
        return [Ok()]

    def _on_config_indication(
        self, cmd: ConfigIndication, now_us: int
    ) -> list[AtResponse]:
        self.state.indication_mode = cmd.mode != 0
        return [Ok()]

    def _on_read(self, cmd: ReadMessage, now_us: int) -> list[AtResponse]:
        if not self.state.text_mode:
            return [Error()]
        msg = self.store.get(cmd.index)
        if msg is None:
            return [CmsError(code=CMS_INVALID_INDEX)]
        content = MessageContent(
            status=MessageStatus.REC_READ if msg.read else MessageStatus.REC_UNREAD,
            sender=msg.sender,
            timestamp=gsm_timestamp(msg.timestamp_us, self.epoch),
            body=msg.body,
        )
        self.store.mark_read(cmd.index)
        return [content, Ok()]

    def _on_delete(self, cmd: DeleteMessage, now_us: int) -> list[AtResponse]:
        if not self.store.delete(cmd.index):
            return [CmsError(code=CMS_INVALID_INDEX)]
        return [Ok()]

    def _on_send(self, cmd: SendMessage, now_us: int) -> list[AtResponse]:
        if not self.state.text_mode:
            return [Error()]
        self.state.awaiting_body_for = cmd.recipient
        return [SendPrompt()]

    def _on_body(self, cmd: SendBody, now_us: int) -> list[AtResponse]:
        recipient = self.state.awaiting_body_for
        if recipient is None:
            return [Error()]
        self.state.awaiting_body_for = None
        reference = self._next_reference
        self._next_reference = (self._next_reference + 1) % 256
        self.submit_outbound(recipient, cmd.body, now_us)
        return [SentAck(reference=reference), Ok()]

    # -------------------------------------------------------------------------
    # Network side
    # -------------------------------------------------------------------------
    def submit_outbound(self, recipient: str, body: str, now_us: int) -> int:
        """Send an SMS from the modem's number; return its due time."""
        return self.network.submit(self.number, recipient, body, now_us).due_us

    def deliver_inbound(
        self, sms: NetworkSms, now_us: int
    ) -> tuple[int, NewMessageIndication | None]:
        """Store an arriving SMS and return its slot and optional ``+CMTI``.

        Raises
        ------
        StoreFull
            The store is full; the message is discarded and counted.
        """
        try:
            msg = self.store.store(sms.sender, sms.body, now_us)
        except StoreFull:
            self.store_full += 1
            logger.warning(
                "SIM store full; SMS #{} from {} discarded",
                sms.message_id,
                sms.sender,
            )
            raise
        logger.debug("SMS #{} stored in slot {}", sms.message_id, msg.index)
        if not self.state.indication_mode:
            return msg.index, None
        return msg.index, NewMessageIndication(index=msg.index)


__all__ = [
    "CMS_INVALID_INDEX",
    "SimStore",
    "ModemState",
    "NetworkSms",
    "CellularNetwork",
    "ModemReply",
    "GsmModem",
]
