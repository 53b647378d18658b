"""TLV-in-CSV wire codec for the band protocol.

One message is one UDP datagram: a comma-joined stream of type/length/value
triples in plain ASCII, e.g. ``MSG,1,STOP,SEQ,1,7``. The first triple is
always MSG (the message kind), the second always SEQ, so a
microcontroller-class client can dispatch after reading six tokens. Unknown
tags after that prefix are skipped for forward compatibility.

decode() is total: any byte string up to the datagram cap either yields a
message or raises a WireError naming the offending token and byte offset.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Union

MAX_DATAGRAM_BYTES = 8192
MAX_CHANNEL_SAMPLES = 512
NUM_CHANNELS = 8
MAX_SEQ = 2**32 - 1
PWM_MAX = 1023

_TAG_RE = re.compile(r"[A-Z0-9]{1,8}\Z")
_INT_RE = re.compile(r"-?(0|[1-9][0-9]*)\Z")
_CH_RE = re.compile(r"CH([0-7])\Z")
_VALUE_RE = re.compile(r"[\x21-\x2b\x2d-\x7e]+\Z")  # printable ASCII, no comma/space


class WireError(ValueError):
    """Base for codec failures; `code` is the stable error identifier."""

    code = "E_WIRE"

    def __init__(self, message: str, token: int | None = None, offset: int | None = None):
        where = ""
        if token is not None:
            where = f" at token {token}" + (f" (byte {offset})" if offset is not None else "")
        super().__init__(f"{self.code}: {message}{where}")
        self.token = token
        self.offset = offset


class MalformedError(WireError):
    code = "E_MALFORMED"


class BadPrefixError(WireError):
    code = "E_BAD_PREFIX"


class RangeError(WireError):
    code = "E_RANGE"


class TooLargeError(WireError):
    code = "E_TOO_LARGE"


@dataclass(frozen=True)
class PatternMsg:
    """One pre-rendered cycle per channel; the client expands repeat/delay."""

    seq: int
    delta_ms: int
    repeat: int
    delay_ms: int
    channels: dict[int, tuple[int, ...]] = field(default_factory=dict)

    kind = "PATTERN"

    def __post_init__(self):
        object.__setattr__(self, "channels",
                           {ch: tuple(v) for ch, v in self.channels.items()})


@dataclass(frozen=True)
class StopMsg:
    seq: int

    kind = "STOP"


@dataclass(frozen=True)
class AckMsg:
    seq: int

    kind = "ACK"


@dataclass(frozen=True)
class HelloMsg:
    seq: int
    device_id: str
    channel_count: int

    kind = "HELLO"


WireMessage = Union[PatternMsg, StopMsg, AckMsg, HelloMsg]


def encode(msg: WireMessage) -> bytes:
    """Encode a message to its canonical datagram bytes."""
    _check_seq(msg.seq)
    tokens = ["MSG", "1", msg.kind, "SEQ", "1", str(msg.seq)]
    if isinstance(msg, PatternMsg):
        if msg.delta_ms < 1:
            raise RangeError("DELTA must be >= 1")
        if msg.repeat < 1:
            raise RangeError("REP must be >= 1")
        if msg.delay_ms < 0:
            raise RangeError("DLY must be >= 0")
        if not msg.channels:
            raise MalformedError("PATTERN needs at least one channel block")
        tokens += ["DELTA", "1", str(msg.delta_ms),
                   "REP", "1", str(msg.repeat),
                   "DLY", "1", str(msg.delay_ms)]
        for ch in sorted(msg.channels):
            if not 0 <= ch < NUM_CHANNELS:
                raise RangeError(f"channel index {ch} outside 0..{NUM_CHANNELS - 1}")
            samples = msg.channels[ch]
            if len(samples) > MAX_CHANNEL_SAMPLES:
                raise TooLargeError(
                    f"channel {ch} has {len(samples)} samples, cap is {MAX_CHANNEL_SAMPLES}")
            for v in samples:
                if not 0 <= v <= PWM_MAX:
                    raise RangeError(f"PWM value {v} outside [0, {PWM_MAX}]")
            tokens += [f"CH{ch}", str(len(samples))]
            tokens += [str(v) for v in samples]
    elif isinstance(msg, HelloMsg):
        if not _VALUE_RE.match(msg.device_id) or len(msg.device_id) > 64:
            raise MalformedError("device id must be 1..64 printable ASCII chars, no commas")
        if not 1 <= msg.channel_count <= NUM_CHANNELS:
            raise RangeError(f"NCH must be in 1..{NUM_CHANNELS}")
        tokens += ["ID", "1", msg.device_id, "NCH", "1", str(msg.channel_count)]
    elif not isinstance(msg, (StopMsg, AckMsg)):
        raise MalformedError(f"unsupported message type {type(msg).__name__}")
    data = ",".join(tokens).encode("ascii")
    if len(data) > MAX_DATAGRAM_BYTES:
        raise TooLargeError(f"encoded size {len(data)} exceeds {MAX_DATAGRAM_BYTES} bytes")
    return data


def _check_seq(seq: int) -> None:
    if not isinstance(seq, int) or isinstance(seq, bool):
        raise MalformedError("SEQ must be an integer")
    if not 0 <= seq <= MAX_SEQ:
        raise RangeError(f"SEQ {seq} outside unsigned 32-bit range")


class _TokenReader:
    """Walks TLV triples over the comma-split token list."""

    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0
        # Byte offset of each token start, for error reporting.
        self.offsets = []
        at = 0
        for t in tokens:
            self.offsets.append(at)
            at += len(t) + 1

    def _fail(self, exc: type[WireError], message: str, index: int | None = None):
        i = self.pos if index is None else index
        off = self.offsets[i] if i < len(self.offsets) else self.offsets[-1]
        raise exc(message, token=i, offset=off)

    def exhausted(self) -> bool:
        return self.pos >= len(self.tokens)

    def triple(self) -> tuple[str, list[str], int]:
        """Read one (tag, values, tag_token_index) triple."""
        start = self.pos
        if self.pos + 2 > len(self.tokens):
            self._fail(MalformedError, "truncated triple")
        tag = self.tokens[self.pos]
        if not _TAG_RE.match(tag):
            self._fail(MalformedError, f"invalid tag {tag!r}")
        length = self._int(self.tokens[self.pos + 1], "length", self.pos + 1)
        if length < 0:
            self._fail(MalformedError, "negative length", self.pos + 1)
        first_value = self.pos + 2
        if first_value + length > len(self.tokens):
            self._fail(MalformedError,
                       f"token count mismatch: {tag} declares {length} values", start)
        values = self.tokens[first_value:first_value + length]
        self.pos = first_value + length
        return tag, values, start

    def _int(self, token: str, what: str, index: int) -> int:
        if not _INT_RE.match(token):
            self._fail(MalformedError, f"non-integer {what} {token!r}", index)
        return int(token)

    def int_value(self, tag: str, values: list[str], index: int,
                  lo: int, hi: int, what: str) -> int:
        if len(values) != 1:
            self._fail(MalformedError, f"{tag} length must be 1", index)
        value = self._int(values[0], what, index + 2)
        if not lo <= value <= hi:
            self._fail(RangeError, f"{what} {value} outside [{lo}, {hi}]", index + 2)
        return value


def decode(data: bytes) -> WireMessage:
    """Decode datagram bytes; inverse of encode() on encode's image."""
    if len(data) > MAX_DATAGRAM_BYTES:
        raise TooLargeError(f"datagram size {len(data)} exceeds {MAX_DATAGRAM_BYTES} bytes")
    if not data:
        raise MalformedError("empty datagram")
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as e:
        raise MalformedError(f"non-ASCII byte at offset {e.start}", offset=e.start) from None
    if "\r" in text or "\n" in text:
        raise MalformedError("CR/LF not allowed")

    reader = _TokenReader(text.split(","))

    tag, values, index = reader.triple()
    if tag != "MSG":
        raise BadPrefixError(f"first field must be MSG, got {tag!r}", token=index, offset=0)
    if len(values) != 1:
        raise MalformedError("MSG length must be 1", token=index)
    kind = values[0]
    if kind not in ("PATTERN", "STOP", "ACK", "HELLO"):
        raise MalformedError(f"unknown message kind {kind!r}", token=index + 2)

    tag, values, index = reader.triple()
    if tag != "SEQ":
        raise BadPrefixError(f"second field must be SEQ, got {tag!r}",
                             token=index, offset=reader.offsets[index])
    seq = reader.int_value("SEQ", values, index, 0, MAX_SEQ, "SEQ")

    if kind == "STOP":
        _skip_rest(reader)
        return StopMsg(seq=seq)
    if kind == "ACK":
        _skip_rest(reader)
        return AckMsg(seq=seq)
    if kind == "HELLO":
        return _decode_hello(reader, seq)
    return _decode_pattern(reader, seq)


def _skip_rest(reader: _TokenReader) -> None:
    # Unknown trailing tags are tolerated but must still be well-formed TLV.
    while not reader.exhausted():
        reader.triple()


def _decode_hello(reader: _TokenReader, seq: int) -> HelloMsg:
    device_id: str | None = None
    channel_count: int | None = None
    while not reader.exhausted():
        tag, values, index = reader.triple()
        if tag == "ID":
            if device_id is not None:
                reader._fail(MalformedError, "duplicate ID field", index)
            if len(values) != 1:
                reader._fail(MalformedError, "ID length must be 1", index)
            device_id = values[0]
        elif tag == "NCH":
            if channel_count is not None:
                reader._fail(MalformedError, "duplicate NCH field", index)
            channel_count = reader.int_value("NCH", values, index, 1, NUM_CHANNELS, "NCH")
    if device_id is None:
        raise MalformedError("HELLO missing ID field")
    if channel_count is None:
        raise MalformedError("HELLO missing NCH field")
    return HelloMsg(seq=seq, device_id=device_id, channel_count=channel_count)


def _decode_pattern(reader: _TokenReader, seq: int) -> PatternMsg:
    delta: int | None = None
    repeat: int | None = None
    delay: int | None = None
    channels: dict[int, tuple[int, ...]] = {}
    while not reader.exhausted():
        tag, values, index = reader.triple()
        if tag == "DELTA":
            if delta is not None:
                reader._fail(MalformedError, "duplicate DELTA field", index)
            delta = reader.int_value("DELTA", values, index, 1, 2**31 - 1, "DELTA")
        elif tag == "REP":
            if repeat is not None:
                reader._fail(MalformedError, "duplicate REP field", index)
            repeat = reader.int_value("REP", values, index, 1, MAX_SEQ, "REP")
        elif tag == "DLY":
            if delay is not None:
                reader._fail(MalformedError, "duplicate DLY field", index)
            delay = reader.int_value("DLY", values, index, 0, 2**31 - 1, "DLY")
        else:
            m = _CH_RE.match(tag)
            if not m:
                continue  # unknown tag: skipped for forward compatibility
            ch = int(m.group(1))
            if ch in channels:
                reader._fail(MalformedError, f"duplicate CH{ch} block", index)
            if len(values) > MAX_CHANNEL_SAMPLES:
                reader._fail(TooLargeError,
                             f"CH{ch} has {len(values)} samples, cap is {MAX_CHANNEL_SAMPLES}",
                             index)
            samples = []
            for j, token in enumerate(values):
                value_index = index + 2 + j
                value = reader._int(token, "PWM value", value_index)
                if not 0 <= value <= PWM_MAX:
                    reader._fail(RangeError,
                                 f"PWM value {value} outside [0, {PWM_MAX}]", value_index)
                samples.append(value)
            channels[ch] = tuple(samples)
    for name, value in (("DELTA", delta), ("REP", repeat), ("DLY", delay)):
        if value is None:
            raise MalformedError(f"PATTERN missing {name} field")
    if not channels:
        raise MalformedError("PATTERN has no channel blocks")
    return PatternMsg(seq=seq, delta_ms=delta, repeat=repeat, delay_ms=delay,
                      channels=channels)
