"""Tests for the AT command and response codec."""

from __future__ import annotations

import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from smart_gsm_home.at_codec import (
    MAX_BODY_LENGTH,
    MAX_FRAME_LENGTH,
    PROMPT,
    Attention,
    CmsError,
    ConfigIndication,
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
    is_phone_number,
    is_sms_text,
    parse_command,
    parse_response,
    render_command,
    render_response,
)
from smart_gsm_home.enums import MessageStatus
from smart_gsm_home.errors import MalformedCommand, MalformedResponse

phones = st.from_regex(r"\+?[0-9]{1,15}", fullmatch=True)
bodies = st.text(
    alphabet=st.characters(min_codepoint=0x20, max_codepoint=0x7E),
    max_size=MAX_BODY_LENGTH,
)
slots = st.integers(min_value=1, max_value=255)
timestamps = st.builds(
    lambda y, mo, d, h, mi, s: f"{y:02}/{mo:02}/{d:02},{h:02}:{mi:02}:{s:02}+00",
    st.integers(0, 99),
    st.integers(1, 12),
    st.integers(1, 28),
    st.integers(0, 23),
    st.integers(0, 59),
    st.integers(0, 59),
)

commands = st.one_of(
    st.just(Attention()),
    st.builds(SetTextMode, enabled=st.booleans()),
    st.builds(ReadMessage, index=slots),
    st.builds(SendMessage, recipient=phones),
    st.builds(SendBody, body=bodies),
    st.builds(DeleteMessage, index=slots),
    st.builds(ConfigIndication, mode=st.integers(0, 3)),
)
responses = st.one_of(
    st.just(Ok()),
    st.just(Error()),
    st.just(SendPrompt()),
    st.builds(CmsError, code=st.integers(0, 999)),
    st.builds(SentAck, reference=st.integers(0, 255)),
    st.builds(NewMessageIndication, index=slots),
    st.builds(
        MessageContent,
        status=st.sampled_from(list(MessageStatus)),
        sender=phones,
        timestamp=timestamps,
        body=bodies,
    ),
)


class TestParseCommand(unittest.TestCase):
    def test_known_lines(self):
        cases = {
            b"AT\r": Attention(),
            b"AT+CMGF=1\r": SetTextMode(enabled=True),
            b"AT+CMGR=3\r": ReadMessage(index=3),
            b'AT+CMGS="+60123456789"\r': SendMessage(recipient="+60123456789"),
            b"AT+CMGD=255\r": DeleteMessage(index=255),
            b"AT+CNMI=0\r": ConfigIndication(mode=0),
            b"L1:ON L2:OFF\x1a": SendBody(body="L1:ON L2:OFF"),
        }
        for line, expected in cases.items():
            with self.subTest(line=line):
                self.assertEqual(parse_command(line), expected)

    def test_command_names_case_insensitive(self):
        self.assertEqual(parse_command(b"at+cmgr=7\r"), ReadMessage(index=7))

    def test_rejections(self):
        for line in (
            b"AT+CMGR=0\r",
            b"AT+CMGR=256\r",
            b"AT+CMGF=2\r",
            b"AT+FOO\r",
            b"AT",
            b"AT+CMGS=+6012\r",
            b"\xffAT\r",
            b"A" * (MAX_BODY_LENGTH + 1) + b"\x1a",
            b"",
        ):
            with self.subTest(line=line), self.assertRaises(MalformedCommand):
                parse_command(line)

    def test_non_bytes_rejected(self):
        with self.assertRaises(MalformedCommand):
            parse_command("AT\r")

    def test_render_is_canonical(self):
        self.assertEqual(render_command(SetTextMode(enabled=True)), b"AT+CMGF=1\r")
        self.assertEqual(
            render_command(SendMessage(recipient="+60123")), b'AT+CMGS="+60123"\r'
        )

    @settings(max_examples=2000, deadline=None)
    @given(commands)
    def test_command_round_trip(self, cmd):
        self.assertEqual(parse_command(render_command(cmd)), cmd)

    @settings(max_examples=3000, deadline=None)
    @given(st.binary(max_size=64))
    def test_arbitrary_bytes_parse_or_reject(self, data):
        try:
            parse_command(data)
        except MalformedCommand:
            pass


class TestParseResponse(unittest.TestCase):
    def test_known_blocks(self):
        self.assertEqual(parse_response(b"\r\nOK\r\n"), Ok())
        self.assertEqual(parse_response(b"\r\nERROR\r\n"), Error())
        self.assertEqual(parse_response(b"\r\n+CMS ERROR: 321\r\n"), CmsError(code=321))
        self.assertEqual(parse_response(PROMPT), SendPrompt())
        self.assertEqual(parse_response(b"\r\n+CMGS: 12\r\n"), SentAck(reference=12))
        self.assertEqual(
            parse_response(b'\r\n+CMTI: "SM",4\r\n'), NewMessageIndication(index=4)
        )

    def test_message_content(self):
        block = (
            b'\r\n+CMGR: "REC UNREAD","+60123456789","15/01/01,00:00:05+00"'
            b"\r\nL1ON\r\n"
        )
        resp = parse_response(block)
        self.assertIsInstance(resp, MessageContent)
        self.assertEqual(resp.status, MessageStatus.REC_UNREAD)
        self.assertEqual(resp.sender, "+60123456789")
        self.assertEqual(resp.body, "L1ON")

    def test_rejections(self):
        for block in (
            b"OK",
            b"\r\nOK",
            b"\r\nMAYBE\r\n",
            b'\r\n+CMTI: "SM",0\r\n',
            b"\r\nOK\r\nOK\r\nOK\r\n",
            b"\r\n\xc3\xa9\r\n",
        ):
            with self.subTest(block=block), self.assertRaises(MalformedResponse):
                parse_response(block)

    @settings(max_examples=2000, deadline=None)
    @given(responses)
    def test_response_round_trip(self, resp):
        self.assertEqual(parse_response(render_response(resp)), resp)

    @settings(max_examples=3000, deadline=None)
    @given(st.binary(max_size=64))
    def test_arbitrary_bytes_parse_or_reject(self, data):
        try:
            parse_response(data)
        except MalformedResponse:
            pass


class TestFrameResponses(unittest.TestCase):
    def test_split_with_partial_tail(self):
        blocks, rest = frame_responses(b'\r\nOK\r\n\r\n+CMTI: "SM",1')
        self.assertEqual(blocks, [b"\r\nOK\r\n"])
        self.assertEqual(rest, b'\r\n+CMTI: "SM",1')

    def test_message_content_is_one_block(self):
        block = render_response(
            MessageContent(
                status=MessageStatus.REC_UNREAD,
                sender="+601",
                timestamp="15/01/01,00:00:00+00",
                body="ALLON",
            )
        )
        blocks, rest = frame_responses(block + render_response(Ok()))
        self.assertEqual(blocks, [block, b"\r\nOK\r\n"])
        self.assertEqual(rest, b"")

    def test_prompt(self):
        blocks, rest = frame_responses(PROMPT)
        self.assertEqual(blocks, [PROMPT])
        self.assertEqual(rest, b"")

    def test_garbage_surfaces_as_block(self):
        blocks, _ = frame_responses(b"junk\r\nOK\r\n")
        self.assertEqual(blocks[0], b"junk")
        self.assertEqual(parse_response(blocks[1]), Ok())

    def test_unbounded_garbage_flushed(self):
        garbage = b"x" * (MAX_FRAME_LENGTH + 1)
        blocks, rest = frame_responses(garbage)
        self.assertEqual(blocks, [garbage])
        self.assertEqual(rest, b"")

    @settings(max_examples=500, deadline=None)
    @given(st.lists(responses, max_size=5))
    def test_concatenated_stream_reframes(self, items):
        stream = b"".join(render_response(r) for r in items)
        blocks, rest = frame_responses(stream)
        self.assertEqual(rest, b"")
        self.assertEqual([parse_response(b) for b in blocks], items)


class TestPredicates(unittest.TestCase):
    def test_phone_number(self):
        self.assertTrue(is_phone_number("+60123456789"))
        self.assertFalse(is_phone_number("+"))
        self.assertFalse(is_phone_number("1" * 16))

    def test_sms_text(self):
        self.assertTrue(is_sms_text("L1ON"))
        self.assertTrue(is_sms_text(""))
        self.assertFalse(is_sms_text("a\rb"))
        self.assertFalse(is_sms_text("x" * (MAX_BODY_LENGTH + 1)))


if __name__ == "__main__":
    unittest.main()
