"""Canonical game transcript format: JSONL, one event per line.

Schema per line: ``{"seq": int, "time": int, "actor": "P1"|"P2"|"system",
"kind": str, "payload": object}``. The first event of every transcript is a
``board_init`` carrying the game config, the placement seed, and the
transcript id, which together make the transcript replayable.

Event kinds and payloads:

* ``board_init``  {"transcript_id": str, "seed": int, "config": {...}}
* ``utterance``   {"text": str}
* ``move_to``     {"pos": [x, y]}
* ``pickup``      {"card": "5H"}
* ``drop``        {"card": "5H"}
* ``bump``        {"dir": "north"}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

PLAYERS = ("P1", "P2")
ACTORS = ("P1", "P2", "system")

EVENT_KINDS = ("board_init", "utterance", "move_to", "pickup", "drop", "bump")


class TranscriptError(ValueError):
    """Base for transcript parsing failures; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class SchemaError(TranscriptError):
    pass


class NonMonotonicSeq(TranscriptError):
    pass


class MissingBoardInit(TranscriptError):
    pass


@dataclass(frozen=True)
class TranscriptEvent:
    seq: int
    time: int
    actor: str
    kind: str
    payload: dict

    def to_json(self) -> dict:
        return {
            "seq": self.seq,
            "time": self.time,
            "actor": self.actor,
            "kind": self.kind,
            "payload": self.payload,
        }


@dataclass(frozen=True)
class Transcript:
    events: tuple[TranscriptEvent, ...]

    @property
    def transcript_id(self) -> str:
        return self.events[0].payload.get("transcript_id", "")

    @property
    def board_init(self) -> TranscriptEvent:
        return self.events[0]

    def event_at(self, seq: int) -> TranscriptEvent | None:
        for ev in self.events:
            if ev.seq == seq:
                return ev
        return None

    def index_of_seq(self, seq: int) -> int:
        for i, ev in enumerate(self.events):
            if ev.seq == seq:
                return i
        raise KeyError(f"no event with seq {seq}")


def dumps_canonical(obj) -> str:
    """Single canonical JSON rendering so identical data is byte-identical."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _check_event(obj: dict, line: int) -> TranscriptEvent:
    if not isinstance(obj, dict):
        raise SchemaError("event is not an object", line)
    missing = {"seq", "time", "actor", "kind", "payload"} - obj.keys()
    if missing:
        raise SchemaError(f"missing keys {sorted(missing)}", line)
    if not isinstance(obj["seq"], int) or isinstance(obj["seq"], bool):
        raise SchemaError("seq must be an integer", line)
    if not isinstance(obj["time"], int) or isinstance(obj["time"], bool):
        raise SchemaError("time must be an integer", line)
    if obj["actor"] not in ACTORS:
        raise SchemaError(f"unknown actor {obj['actor']!r}", line)
    if obj["kind"] not in EVENT_KINDS:
        raise SchemaError(f"unknown kind {obj['kind']!r}", line)
    if not isinstance(obj["payload"], dict):
        raise SchemaError("payload must be an object", line)
    return TranscriptEvent(
        seq=obj["seq"], time=obj["time"], actor=obj["actor"],
        kind=obj["kind"], payload=obj["payload"],
    )


def parse_transcript(stream: IO[str] | str | Iterable[str]) -> Transcript:
    """Parse and validate transcript JSONL from a string or line stream."""
    if isinstance(stream, str):
        lines: Iterator[str] = iter(stream.splitlines())
    else:
        lines = iter(stream)

    events: list[TranscriptEvent] = []
    last_seq: int | None = None
    lineno = 0
    for raw in lines:
        lineno += 1
        raw = raw.strip()
        if not raw:
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as e:
            raise SchemaError(f"bad JSON: {e.msg}", lineno) from e
        ev = _check_event(obj, lineno)
        if last_seq is not None and ev.seq <= last_seq:
            raise NonMonotonicSeq(f"seq {ev.seq} after {last_seq}", lineno)
        if not events and ev.kind != "board_init":
            raise MissingBoardInit("first event must be board_init", lineno)
        last_seq = ev.seq
        events.append(ev)
    if not events:
        raise MissingBoardInit("empty transcript")
    return Transcript(events=tuple(events))


def serialize_transcript(transcript: Transcript) -> str:
    return "".join(dumps_canonical(ev.to_json()) + "\n" for ev in transcript.events)


def load_transcript(path) -> Transcript:
    with open(path, "r", encoding="utf-8") as f:
        return parse_transcript(f)


def save_transcript(transcript: Transcript, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_transcript(transcript))
