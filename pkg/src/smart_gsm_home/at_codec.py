"""
Text-mode AT command and response codec.

Byte framing on the controller <-> modem link:

- commands are ASCII terminated by a single CR (``0x0D``); the message body
  that follows a ``+CMGS`` prompt is terminated by Ctrl-Z (``0x1A``) instead;
- responses are fenced as ``CRLF payload CRLF``; the send prompt is
  ``CRLF "> "``; a ``+CMGR`` response carries a header line and a body line.

Echo is assumed off. Only the seven command variants defined here are
accepted; anything else raises :class:`~smart_gsm_home.errors.MalformedCommand`.

Examples
--------
>>> parse_command(b"AT+CMGD=1\\r")
DeleteMessage(kind='delete_message', index=1)
>>> render_response(NewMessageIndication(index=3))
b'\\r\\n+CMTI: "SM",3\\r\\n'
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
from collections.abc import Callable
from typing import Annotated, Literal

# =============================================================================
# THIRD-PARTY IMPORTS
# =============================================================================
from pydantic import Field, StringConstraints, ValidationError

# =============================================================================
# LOCAL IMPORTS
# =============================================================================
from .enums import MessageStatus
from .errors import MalformedCommand, MalformedResponse
from .models import SimBaseModel

# =============================================================================
# CONSTANTS
# =============================================================================
CR = b"\r"
CRLF = b"\r\n"
CTRL_Z = b"\x1a"
PROMPT = b"\r\n> "

MAX_BODY_LENGTH = 160
MAX_SLOT_INDEX = 255
# ? Garbage without any frame boundary is flushed once it grows past this.
MAX_FRAME_LENGTH = 512

PHONE_PATTERN = r"\+?[0-9]{1,15}"
BODY_PATTERN = r"[ -~]*"
TIMESTAMP_PATTERN = r"[0-9]{2}/[0-9]{2}/[0-9]{2},[0-9]{2}:[0-9]{2}:[0-9]{2}[+-][0-9]{2}"

PhoneNumber = Annotated[str, StringConstraints(pattern=f"^{PHONE_PATTERN}$")]
SmsBody = Annotated[
    str,
    StringConstraints(max_length=MAX_BODY_LENGTH, pattern=f"^{BODY_PATTERN}$"),
]
SlotIndex = Annotated[int, Field(ge=1, le=MAX_SLOT_INDEX)]
GsmTimestamp = Annotated[str, StringConstraints(pattern=f"^{TIMESTAMP_PATTERN}$")]

_PHONE_RE = re.compile(PHONE_PATTERN)
_BODY_RE = re.compile(BODY_PATTERN)


# =============================================================================
# COMMANDS
# =============================================================================
class Attention(SimBaseModel):
    """``AT``"""

    kind: Literal["attention"] = "attention"


class SetTextMode(SimBaseModel):
    """``AT+CMGF=<0|1>``"""

    kind: Literal["set_text_mode"] = "set_text_mode"
    enabled: bool


class ReadMessage(SimBaseModel):
    """``AT+CMGR=<index>``"""

    kind: Literal["read_message"] = "read_message"
    index: SlotIndex


class SendMessage(SimBaseModel):
    """``AT+CMGS="<recipient>"``"""

    kind: Literal["send_message"] = "send_message"
    recipient: PhoneNumber


class SendBody(SimBaseModel):
    """Message text sent after the ``> `` prompt, terminated by Ctrl-Z."""

    kind: Literal["send_body"] = "send_body"
    body: SmsBody


class DeleteMessage(SimBaseModel):
    """``AT+CMGD=<index>``"""

    kind: Literal["delete_message"] = "delete_message"
    index: SlotIndex


class ConfigIndication(SimBaseModel):
    """``AT+CNMI=<mode>``; mode 0 disables unsolicited ``+CMTI``."""

    kind: Literal["config_indication"] = "config_indication"
    mode: Annotated[int, Field(ge=0, le=3)]


AtCommand = (
    Attention
    | SetTextMode
    | ReadMessage
    | SendMessage
    | SendBody
    | DeleteMessage
    | ConfigIndication
)


# =============================================================================
# RESPONSES
# =============================================================================
class Ok(SimBaseModel):
    kind: Literal["ok"] = "ok"


class Error(SimBaseModel):
    kind: Literal["error"] = "error"


class CmsError(SimBaseModel):
    """``+CMS ERROR: <code>``"""

    kind: Literal["cms_error"] = "cms_error"
    code: Annotated[int, Field(ge=0, le=999)]


class SendPrompt(SimBaseModel):
    kind: Literal["send_prompt"] = "send_prompt"


class MessageContent(SimBaseModel):
    """``+CMGR: "<status>","<sender>","<timestamp>"`` followed by the body line."""

    kind: Literal["message_content"] = "message_content"
    status: MessageStatus
    sender: PhoneNumber
    timestamp: GsmTimestamp
    body: SmsBody


class SentAck(SimBaseModel):
    """``+CMGS: <reference>``"""

    kind: Literal["sent_ack"] = "sent_ack"
    reference: Annotated[int, Field(ge=0, le=255)]


class NewMessageIndication(SimBaseModel):
    """Unsolicited ``+CMTI: "SM",<index>``."""

    kind: Literal["new_message_indication"] = "new_message_indication"
    store: Literal["SM"] = "SM"
    index: SlotIndex


AtResponse = (
    Ok
    | Error
    | CmsError
    | SendPrompt
    | MessageContent
    | SentAck
    | NewMessageIndication
)


class SmsMessage(SimBaseModel):
    """One text message held in a SIM slot."""

    index: SlotIndex
    sender: PhoneNumber
    timestamp_us: Annotated[int, Field(ge=0)]
    body: SmsBody
    read: bool = False


def is_phone_number(text: str) -> bool:
    """Return whether ``text`` has the E.164 shape accepted on the wire."""
    return _PHONE_RE.fullmatch(text) is not None


def is_sms_text(text: str) -> bool:
    """Return whether ``text`` can travel as a text-mode SMS body."""
    return len(text) <= MAX_BODY_LENGTH and _BODY_RE.fullmatch(text) is not None


# =============================================================================
# COMMAND CODEC
# =============================================================================
_CommandRule = tuple[re.Pattern[str], Callable[[re.Match[str]], AtCommand]]

_COMMAND_GRAMMAR: tuple[_CommandRule, ...] = (
    (re.compile(r"AT", re.IGNORECASE), lambda m: Attention()),
    (
        re.compile(r"AT\+CMGF=(?P<mode>[01])", re.IGNORECASE),
        lambda m: SetTextMode(enabled=m["mode"] == "1"),
    ),
    (
        re.compile(r"AT\+CMGR=(?P<index>[0-9]{1,3})", re.IGNORECASE),
        lambda m: ReadMessage(index=int(m["index"])),
    ),
    (
        re.compile(rf"AT\+CMGS=\"(?P<recipient>{PHONE_PATTERN})\"", re.IGNORECASE),
        lambda m: SendMessage(recipient=m["recipient"]),
    ),
    (
        re.compile(r"AT\+CMGD=(?P<index>[0-9]{1,3})", re.IGNORECASE),
        lambda m: DeleteMessage(index=int(m["index"])),
    ),
    (
        re.compile(r"AT\+CNMI=(?P<mode>[0-3])", re.IGNORECASE),
        lambda m: ConfigIndication(mode=int(m["mode"])),
    ),
)


def _decode_printable(data: bytes, error: type[Exception]) -> str:
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError:
        raise error("non-ASCII byte in frame") from None
    if _BODY_RE.fullmatch(text) is None:
        raise error("control character inside frame")
    return text


def parse_command(line: bytes) -> AtCommand:
    """Parse one command line received by the modem.

    Parameters
    ----------
    line : bytes
        Command text terminated by CR, or a message body terminated by Ctrl-Z.

    Returns
    -------
    AtCommand
        The structured command. Command names and the ``AT`` prefix are
        case-insensitive; parameters are parsed exactly.

    Raises
    ------
    MalformedCommand
        Unknown command name, bad parameter, or missing terminator.
    """
    if not isinstance(line, bytes | bytearray):
        raise MalformedCommand(f"expected bytes, got {type(line).__name__}")
    line = bytes(line)

    if line.endswith(CTRL_Z):
        body = _decode_printable(line[:-1], MalformedCommand)
        if len(body) > MAX_BODY_LENGTH:
            raise MalformedCommand(f"message body longer than {MAX_BODY_LENGTH}")
        return SendBody(body=body)

    if not line.endswith(CR):
        raise MalformedCommand("missing CR terminator")
    text = _decode_printable(line[:-1], MalformedCommand)

    for pattern, build in _COMMAND_GRAMMAR:
        match = pattern.fullmatch(text)
        if match is None:
            continue
        try:
            return build(match)
        except ValidationError:
            raise MalformedCommand(f"parameter out of range in {text!r}") from None
    raise MalformedCommand(f"unknown command {text!r}")


def render_command(cmd: AtCommand) -> bytes:
    """Render a command in canonical upper-case form with its terminator."""
    match cmd:
        case Attention():
            text = "AT"
        case SetTextMode(enabled=enabled):
            text = f"AT+CMGF={int(enabled)}"
        case ReadMessage(index=index):
            text = f"AT+CMGR={index}"
        case SendMessage(recipient=recipient):
            text = f'AT+CMGS="{recipient}"'
        case DeleteMessage(index=index):
            text = f"AT+CMGD={index}"
        case ConfigIndication(mode=mode):
            text = f"AT+CNMI={mode}"
        case SendBody(body=body):
            return body.encode("ascii") + CTRL_Z
        case _:
            raise TypeError(f"not an AT command: {cmd!r}")
    return text.encode("ascii") + CR


# =============================================================================
# RESPONSE CODEC
# =============================================================================
_CMGR_HEADER_RE = re.compile(
    rf"\+CMGR: \"(?P<status>REC UNREAD|REC READ)\","
    rf"\"(?P<sender>{PHONE_PATTERN})\",\"(?P<timestamp>{TIMESTAMP_PATTERN})\""
)

_ResponseRule = tuple[re.Pattern[str], Callable[[re.Match[str]], AtResponse]]

_RESPONSE_GRAMMAR: tuple[_ResponseRule, ...] = (
    (re.compile(r"OK"), lambda m: Ok()),
    (re.compile(r"ERROR"), lambda m: Error()),
    (
        re.compile(r"\+CMS ERROR: (?P<code>[0-9]{1,3})"),
        lambda m: CmsError(code=int(m["code"])),
    ),
    (
        re.compile(r"\+CMGS: (?P<reference>[0-9]{1,3})"),
        lambda m: SentAck(reference=int(m["reference"])),
    ),
    (
        re.compile(r"\+CMTI: \"(?P<store>SM)\",(?P<index>[0-9]{1,3})"),
        lambda m: NewMessageIndication(store=m["store"], index=int(m["index"])),
    ),
)


def _parse_payload(text: str) -> AtResponse:
    lines = text.split("\r\n")
    if len(lines) == 2:
        header = _CMGR_HEADER_RE.fullmatch(lines[0])
        if header is None:
            raise MalformedResponse(f"unexpected two-line response {lines[0]!r}")
        return MessageContent(
            status=MessageStatus(header["status"]),
            sender=header["sender"],
            timestamp=header["timestamp"],
            body=lines[1],
        )
    if len(lines) != 1:
        raise MalformedResponse("too many lines in response block")
    for pattern, build in _RESPONSE_GRAMMAR:
        match = pattern.fullmatch(text)
        if match is not None:
            return build(match)
    raise MalformedResponse(f"unknown response {text!r}")


def parse_response(block: bytes) -> AtResponse:
    """Parse one framed response block sent by the modem.

    Raises
    ------
    MalformedResponse
        The block is not one of the known responses or is badly framed.
    """
    if not isinstance(block, bytes | bytearray):
        raise MalformedResponse(f"expected bytes, got {type(block).__name__}")
    block = bytes(block)
    if block == PROMPT:
        return SendPrompt()
    if len(block) < 4 or not (block.startswith(CRLF) and block.endswith(CRLF)):
        raise MalformedResponse("response not fenced by CRLF")
    try:
        text = block[2:-2].decode("ascii")
    except UnicodeDecodeError:
        raise MalformedResponse("non-ASCII byte in response") from None
    try:
        return _parse_payload(text)
    except ValidationError:
        raise MalformedResponse(f"field out of range in {text!r}") from None


def render_response(resp: AtResponse) -> bytes:
    """Render a response with canonical CRLF fencing."""
    match resp:
        case Ok():
            payload = "OK"
        case Error():
            payload = "ERROR"
        case CmsError(code=code):
            payload = f"+CMS ERROR: {code}"
        case SendPrompt():
            return PROMPT
        case MessageContent():
            payload = (
                f'+CMGR: "{resp.status.value}","{resp.sender}","{resp.timestamp}"'
                f"\r\n{resp.body}"
            )
        case SentAck(reference=reference):
            payload = f"+CMGS: {reference}"
        case NewMessageIndication(store=store, index=index):
            payload = f'+CMTI: "{store}",{index}'
        case _:
            raise TypeError(f"not an AT response: {resp!r}")
    return CRLF + payload.encode("ascii") + CRLF


def frame_responses(buffer: bytes) -> tuple[list[bytes], bytes]:
    """Split a modem byte stream into response blocks.

    Parameters
    ----------
    buffer : bytes
        Bytes received so far, possibly ending mid-frame.

    Returns
    -------
    tuple[list[bytes], bytes]
        Complete blocks in arrival order (garbage between frames comes back as
        its own block so the caller can report it), and the unconsumed tail.

    Examples
    --------
    >>> frame_responses(b'\\r\\nOK\\r\\n\\r\\n+CMTI: "SM",1')
    ([b'\\r\\nOK\\r\\n'], b'\\r\\n+CMTI: "SM",1')
    """
    blocks: list[bytes] = []
    pos = 0
    size = len(buffer)
    while pos < size:
        if buffer.startswith(PROMPT, pos):
            blocks.append(PROMPT)
            pos += len(PROMPT)
            continue

        if not buffer.startswith(CRLF, pos):
            if PROMPT.startswith(buffer[pos:]):
                break
            end = buffer.find(CRLF, pos + 1)
            if end < 0:
                if size - pos > MAX_FRAME_LENGTH:
                    blocks.append(buffer[pos:])
                    pos = size
                break
            blocks.append(buffer[pos:end])
            pos = end
            continue

        end = buffer.find(CRLF, pos + 2)
        if end >= 0 and buffer.startswith(b"+CMGR:", pos + 2):
            #? A +CMGR header is followed by exactly one body line.
            end = buffer.find(CRLF, end + 2)
        if end < 0:
            if size - pos > MAX_FRAME_LENGTH:
                blocks.append(buffer[pos:])
                pos = size
            break
        blocks.append(buffer[pos : end + 2])
        pos = end + 2
    return blocks, buffer[pos:]


__all__ = [
    "AtCommand",
    "AtResponse",
    "Attention",
    "SetTextMode",
    "ReadMessage",
    "SendMessage",
    "SendBody",
    "DeleteMessage",
    "ConfigIndication",
    "Ok",
    "Error",
    "CmsError",
    "SendPrompt",
    "MessageContent",
    "SentAck",
    "NewMessageIndication",
    "SmsMessage",
    "PhoneNumber",
    "SmsBody",
    "parse_command",
    "render_command",
    "parse_response",
    "render_response",
    "frame_responses",
    "is_phone_number",
    "is_sms_text",
]
