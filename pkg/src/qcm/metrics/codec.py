"""Line codec for metric logs.

One event per LF-terminated UTF-8 line::

    timestamp_ms<TAB>seq<TAB>player_id<TAB>event_id<TAB>k=v;k=v

Booleans are ``true``/``false``, integers are canonical base-10 (no sign
for non-negative values, no leading zeros). Strings percent-encode ``%``,
TAB, LF, CR, ``;`` and ``=`` with upper-case hex. The parser only accepts
the canonical form, so ``serialize_event(parse_line(x)) == x`` for every
line it accepts.
"""

from __future__ import annotations

import enum
import functools
import io
import os
from typing import IO, Iterable

from .events import (
    BY_NAME,
    CONTRACTS,
    ContractError,
    Diagnostic,
    EventId,
    LogDocument,
    MetricEvent,
    PayloadValue,
    check_payload,
)

LOG_SUFFIX = ".qcmlog"

_ENCODE = str.maketrans({"%": "%25", "\t": "%09", "\n": "%0A", "\r": "%0D", ";": "%3B", "=": "%3D"})
_DECODE = {"25": "%", "09": "\t", "0A": "\n", "0D": "\r", "3B": ";", "3D": "="}


class ParseReason(str, enum.Enum):
    ENCODING = "encoding"
    FIELD_COUNT = "field-count"
    TIMESTAMP = "timestamp"
    SEQ = "seq"
    PLAYER = "player"
    UNKNOWN_EVENT = "unknown-event"
    PAYLOAD_SYNTAX = "payload-syntax"
    CONTRACT = "contract"
    DUPLICATE = "duplicate"
    ORDER = "order"


class ParseError(ValueError):
    def __init__(self, position: int, reason: ParseReason, message: str):
        super().__init__(f"byte {position}: {reason.value}: {message}")
        self.position = position
        self.reason = reason
        self.message = message


def encode_text(s: str) -> str:
    return s.translate(_ENCODE)


def decode_text(s: str) -> str:
    """Inverse of :func:`encode_text`; raises ``ValueError(offset)`` on a bad escape."""
    if "%" not in s:
        return s
    head, *rest = s.split("%")
    out = [head]
    offset = len(head)
    for part in rest:
        ch = _DECODE.get(part[:2])
        if ch is None:
            raise ValueError(offset)
        out.append(ch)
        out.append(part[2:])
        offset += len(part) + 1
    return "".join(out)


def _format_value(value: PayloadValue) -> str:
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    return encode_text(value)


def serialize_event(event: MetricEvent) -> str:
    event.validate()
    payload = ";".join(f"{spec.name}={_format_value(event.payload[spec.name])}" for spec in CONTRACTS[event.event_id])
    return f"{event.timestamp_ms}\t{event.seq}\t{encode_text(event.player_id)}\t{event.event_id.value}\t{payload}\n"


def _is_natural(s: str) -> bool:
    return s.isascii() and s.isdigit() and (s == "0" or s[0] != "0")


def _is_integer(s: str) -> bool:
    return _is_natural(s[1:]) and s != "-0" if s.startswith("-") else _is_natural(s)


def _byte_offset(line: str, char_pos: int) -> int:
    return len(line[:char_pos].encode("utf-8"))


class _PayloadError(Exception):
    def __init__(self, offset: int, reason: ParseReason, message: str):
        self.offset, self.reason, self.message = offset, reason, message


@functools.lru_cache(maxsize=4096)
def _parse_payload(event_id: EventId, payload_raw: str) -> tuple[tuple[str, PayloadValue], ...]:
    """Payload pairs of one record; offsets in errors are relative to the payload field.

    Cached: logs repeat the same few payloads (``value=true``) many times.
    """
    specs = CONTRACTS[event_id]
    eid_raw = event_id.value
    items = payload_raw.split(";")
    if len(items) != len(specs):
        raise _PayloadError(0, ParseReason.CONTRACT, f"{eid_raw} expects {len(specs)} payload keys, got {len(items)}")
    payload: dict[str, PayloadValue] = {}
    pos = 0
    for spec, item in zip(specs, items):
        key, sep, raw = item.partition("=")
        if not sep or "=" in raw:
            raise _PayloadError(pos, ParseReason.PAYLOAD_SYNTAX, f"malformed pair {item!r}")
        if key != spec.name:
            raise _PayloadError(pos, ParseReason.CONTRACT, f"{eid_raw} expects key {spec.name!r}, got {key!r}")
        vpos = pos + len(key) + 1
        if spec.kind is bool:
            if raw == "true":
                value: PayloadValue = True
            elif raw == "false":
                value = False
            else:
                raise _PayloadError(vpos, ParseReason.PAYLOAD_SYNTAX, f"{key} is not a boolean: {raw!r}")
        elif spec.kind is int:
            if not _is_integer(raw):
                raise _PayloadError(vpos, ParseReason.PAYLOAD_SYNTAX, f"{key} is not an integer: {raw!r}")
            value = int(raw)
        else:
            try:
                value = decode_text(raw)
            except ValueError as exc:
                raise _PayloadError(vpos + exc.args[0], ParseReason.PAYLOAD_SYNTAX, f"bad escape in {key}") from None
        payload[key] = value
        pos += len(item) + 1
    try:
        check_payload(event_id, payload)
    except ContractError as exc:
        raise _PayloadError(0, ParseReason.CONTRACT, str(exc)) from None
    return tuple(payload.items())


def parse_line(line: str | bytes) -> MetricEvent:
    """Parse one record; a single trailing LF is accepted and ignored."""
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(exc.start, ParseReason.ENCODING, "invalid UTF-8") from None
    if line.endswith("\n"):
        line = line[:-1]

    def fail(char_pos: int, reason: ParseReason, message: str) -> ParseError:
        return ParseError(_byte_offset(line, char_pos), reason, message)

    if "\n" in line or "\r" in line:
        pos = min(p for p in (line.find("\n"), line.find("\r")) if p >= 0)
        raise fail(pos, ParseReason.PAYLOAD_SYNTAX, f"raw {line[pos]!r} inside record")

    fields = line.split("\t")
    if len(fields) != 5:
        if len(fields) < 5:
            raise fail(len(line), ParseReason.FIELD_COUNT, f"expected 5 fields, got {len(fields)}")
        extra = len("\t".join(fields[:5]))
        raise fail(extra, ParseReason.FIELD_COUNT, f"expected 5 fields, got {len(fields)}")
    ts_raw, seq_raw, pid_raw, eid_raw, payload_raw = fields

    def start_of(index: int) -> int:
        return sum(len(f) + 1 for f in fields[:index])

    if not _is_natural(ts_raw):
        raise fail(0, ParseReason.TIMESTAMP, f"non-numeric timestamp {ts_raw!r}")
    if not _is_natural(seq_raw):
        raise fail(start_of(1), ParseReason.SEQ, f"non-numeric seq {seq_raw!r}")
    try:
        player_id = decode_text(pid_raw)
    except ValueError as exc:
        raise fail(start_of(2) + exc.args[0], ParseReason.PLAYER, "bad escape in player_id") from None
    if not player_id:
        raise fail(start_of(2), ParseReason.PLAYER, "empty player_id")
    event_id = BY_NAME.get(eid_raw)
    if event_id is None:
        raise fail(start_of(3), ParseReason.UNKNOWN_EVENT, f"unknown event {eid_raw!r}")
    try:
        pairs = _parse_payload(event_id, payload_raw)
    except _PayloadError as exc:
        raise fail(start_of(4) + exc.offset, exc.reason, exc.message) from None
    return MetricEvent(int(ts_raw), int(seq_raw), player_id, event_id, dict(pairs))


def _split_records(data: str | bytes) -> list:
    sep = b"\n" if isinstance(data, bytes) else "\n"
    lines = data.split(sep)
    if lines and not lines[-1]:
        lines.pop()
    return lines


def order_events(events: list[MetricEvent], line_nos: list[int], diagnostics: list[Diagnostic]) -> list[MetricEvent]:
    """Sort by (player, seq), dropping duplicate seqs and timestamp regressions."""
    order = sorted(range(len(events)), key=lambda i: (events[i].player_id, events[i].seq))
    kept: list[MetricEvent] = []
    prev: MetricEvent | None = None
    for i in order:
        e = events[i]
        if prev is not None and prev.player_id == e.player_id:
            if prev.seq == e.seq:
                diagnostics.append(
                    Diagnostic(line_nos[i], 0, ParseReason.DUPLICATE.value, f"duplicate seq {e.seq} for {e.player_id!r}")
                )
                continue
            if e.timestamp_ms < prev.timestamp_ms:
                diagnostics.append(
                    Diagnostic(
                        line_nos[i], 0, ParseReason.ORDER.value,
                        f"timestamp {e.timestamp_ms} precedes {prev.timestamp_ms} at earlier seq {prev.seq}",
                    )
                )
                continue
        kept.append(e)
        prev = e
    return kept


def read_log(stream: IO[bytes] | IO[str], source: str = "") -> LogDocument:
    """Load every parseable record; rejects are listed in ``diagnostics``."""
    data = stream.read()
    events: list[MetricEvent] = []
    line_nos: list[int] = []
    diagnostics: list[Diagnostic] = []
    for line_no, raw in enumerate(_split_records(data), start=1):
        try:
            events.append(parse_line(raw))
            line_nos.append(line_no)
        except ParseError as exc:
            diagnostics.append(Diagnostic(line_no, exc.position, exc.reason.value, exc.message))
    events = order_events(events, line_nos, diagnostics)
    diagnostics.sort(key=lambda d: d.line_no)
    return LogDocument(events=events, source=source, diagnostics=diagnostics)


def read_log_file(path: str | os.PathLike[str]) -> LogDocument:
    with open(path, "rb") as fh:
        return read_log(fh, source=os.fspath(path))


def read_logs(paths: Iterable[str | os.PathLike[str]]) -> LogDocument:
    """Merge several log files into one document."""
    buf = io.BytesIO()
    for p in paths:
        with open(p, "rb") as fh:
            chunk = fh.read()
        buf.write(chunk)
        if chunk and not chunk.endswith(b"\n"):
            buf.write(b"\n")
    buf.seek(0)
    return read_log(buf, source="+".join(os.fspath(p) for p in paths))


def dumps_log(events: Iterable[MetricEvent]) -> str:
    return "".join(serialize_event(e) for e in events)


def write_log(events: Iterable[MetricEvent], path: str | os.PathLike[str]) -> int:
    text = dumps_log(events)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return text.count("\n")


__all__ = [
    "LOG_SUFFIX",
    "EventId",
    "ParseError",
    "ParseReason",
    "decode_text",
    "dumps_log",
    "encode_text",
    "parse_line",
    "read_log",
    "read_log_file",
    "read_logs",
    "serialize_event",
    "write_log",
]
