"""Command-type tagging, follow-up labeling, and dataset splitting.

A *locative* utterance states where a card is ("there is a 5h in the very
top left corner") without naming an agent or an action. Each locative
mention of a card becomes a labeled instance: Positive when the addressee
follows up on it (picks the card up, signals intent to, or asks where
exactly), Negative when the speaker acts on their own statement or nobody
does.

The follow-up judgment scans a bounded window after the utterance: the
next ``window`` events (default 20) or up to the next locative utterance,
whichever comes first.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .cards import Card, extract_cards, parse_card
from .transcripts import Transcript, dumps_canonical

POSITIVE = "positive"
NEGATIVE = "negative"

DEFAULT_FOLLOWUP_WINDOW = 20

IMPERATIVE = "imperative"
PERFORMATIVE = "performative"
LOCATIVE = "locative"

# Verbs that open a bare imperative in game chat.
ACTION_VERBS = frozenset({
    "pick", "grab", "drop", "keep", "get", "take", "go", "come", "move",
    "find", "search", "look", "tell", "talk", "say", "bring", "leave",
    "hold", "check", "head", "meet", "give", "stay", "wait", "collect",
})

SECOND_PERSON = frozenset({"you", "your", "yours", "u", "ur"})

# Leading discourse fillers skipped before the imperative-verb check.
LEADING_FILLERS = frozenset({
    "ok", "okay", "so", "well", "now", "hey", "oh", "hmm", "umm", "uh",
    "lol", "haha", "please", "pls", "and", "or", "but", "then", "also",
    "yes", "yeah", "no", "nah", "alright", "right", "just",
})

# Card expression as it appears inside an utterance (delegated to cards.py
# for actual extraction; this pattern only anchors the locative frame).
_CARD_EXPR = (
    r"(?:(?:a|an|the)\s+)?"
    r"(?:(?:10|[2-9]|[atjqk])[cdhs]"
    r"|(?:10|[1-9]|ace|two|three|four|five|six|seven|eight|nine|ten|jack|queen|king)"
    r"\s+of\s+(?:club|diamond|heart|spade)s?)"
)

_PLACE_PREP = r"(?:in|at|near|by|on)"

# "there is a 5h in the very top left corner" / "the 5h is in the corner"
_LOCATIVE_RES = (
    re.compile(
        r"\bthere\s+(?:is|are)\s+" + _CARD_EXPR + r".{0,40}?\s" + _PLACE_PREP + r"\s+\S+",
        re.IGNORECASE,
    ),
    re.compile(
        r"\b" + _CARD_EXPR + r"\s+(?:is|are)\s+" + _PLACE_PREP + r"\s+\S+",
        re.IGNORECASE,
    ),
)

# Addressee utterances that commit to acting on the mentioned card.
INTENT_PATTERNS = tuple(re.compile(p, re.IGNORECASE) for p in (
    r"\bi(?:'?ll| will)\s+(?:get|grab|take|fetch|go|head|pick)\b",
    r"\bi(?:'?m| am)\s+(?:on it|going|heading|getting)\b",
    r"\bon my way\b",
    r"\bomw\b",
    r"\bwill do\b",
    r"\bgoing\s+(?:there|now|to get)\b",
    r"\bi\s+(?:got|grabbed|picked up)\s+it\b",
    r"\bgot it\b",
))

# Addressee questions about the card's whereabouts.
CLARIFY_PATTERNS = tuple(re.compile(p, re.IGNORECASE) for p in (
    r"\bwhere\s+exactly\b",
    r"\bwhere\s+is\s+(?:it|that|the)\b",
    r"\bwhere\?+",
    r"\bwhich\s+(?:corner|side|row|column|wall|part)\b",
    r"^(?:the\s+)?(?:very\s+)?(?:top|bottom|left|right|middle|center)[\w\s]*\?$",
))


class NotAnUtterance(ValueError):
    pass


class EmptyDataset(ValueError):
    pass


@dataclass(frozen=True)
class LocativeInstance:
    transcript_id: str
    seq: int
    speaker: str
    card: Card
    label: str

    @property
    def instance_id(self) -> str:
        return f"{self.transcript_id}:{self.seq}:{self.card}"

    @property
    def addressee(self) -> str:
        return "P2" if self.speaker == "P1" else "P1"

    def to_json(self) -> dict:
        return {
            "transcript_id": self.transcript_id,
            "seq": self.seq,
            "speaker": self.speaker,
            "card": str(self.card),
            "label": self.label,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LocativeInstance":
        return cls(
            transcript_id=obj["transcript_id"], seq=int(obj["seq"]),
            speaker=obj["speaker"], card=parse_card(obj["card"]),
            label=obj["label"],
        )


def _simple_tokens(text: str) -> list[str]:
    return re.findall(r"[\w':)(]+", text.lower())


def is_locative(text: str) -> bool:
    """Locative frame match with no second-person pronoun anywhere."""
    toks = set(_simple_tokens(text))
    if toks & SECOND_PERSON:
        return False
    return any(rx.search(text) for rx in _LOCATIVE_RES)


def tag_command_type(text: str) -> str | None:
    """Coarse command-type tag: imperative, locative, performative, or None.

    Rule cascade: an utterance opening (after discourse fillers) with an
    action verb is imperative; a card-location frame with no second-person
    pronoun is locative; second person plus an action verb anywhere is
    performative; anything else is untagged.
    """
    toks = _simple_tokens(text)
    core = toks
    while core and core[0] in LEADING_FILLERS:
        core = core[1:]
    if core and core[0] in ACTION_VERBS:
        return IMPERATIVE
    if is_locative(text):
        return LOCATIVE
    tokset = set(toks)
    if tokset & SECOND_PERSON and tokset & ACTION_VERBS:
        return PERFORMATIVE
    return None


def mentioned_cards(text: str) -> list[Card]:
    return extract_cards(text)


def label_followup(transcript: Transcript, seq: int, mentioned: Card,
                   window: int = DEFAULT_FOLLOWUP_WINDOW) -> str:
    """Label one locative mention by what happens next.

    Scanning at most ``window`` events past the utterance and stopping at
    the next locative utterance: the addressee picking up the card, or
    uttering an intent/clarification line, is Positive; the speaker picking
    the card up, a later locative, or window exhaustion is Negative.
    """
    idx = transcript.index_of_seq(seq)
    ev = transcript.events[idx]
    if ev.kind != "utterance":
        raise NotAnUtterance(f"event {seq} is {ev.kind}, not an utterance")
    speaker = ev.actor
    addressee = "P2" if speaker == "P1" else "P1"

    for follower in transcript.events[idx + 1: idx + 1 + window]:
        if follower.kind == "utterance" and is_locative(follower.payload["text"]):
            return NEGATIVE
        if follower.kind == "pickup":
            card = parse_card(follower.payload["card"])
            if card == mentioned and follower.actor == addressee:
                return POSITIVE
            if card == mentioned and follower.actor == speaker:
                return NEGATIVE
        if follower.kind == "utterance" and follower.actor == addressee:
            text = follower.payload["text"]
            if any(rx.search(text) for rx in INTENT_PATTERNS):
                return POSITIVE
            if any(rx.search(text) for rx in CLARIFY_PATTERNS):
                return POSITIVE
    return NEGATIVE


def find_instances(transcript: Transcript,
                   window: int = DEFAULT_FOLLOWUP_WINDOW) -> list[LocativeInstance]:
    """All labeled locative instances in a transcript, one per mentioned card."""
    out: list[LocativeInstance] = []
    for ev in transcript.events:
        if ev.kind != "utterance":
            continue
        text = ev.payload["text"]
        if tag_command_type(text) != LOCATIVE:
            continue
        for card in mentioned_cards(text):
            label = label_followup(transcript, ev.seq, card, window=window)
            out.append(LocativeInstance(
                transcript_id=transcript.transcript_id, seq=ev.seq,
                speaker=ev.actor, card=card, label=label,
            ))
    return out


def split(instances: Sequence, ratio: float, seed: int) -> tuple[list, list]:
    """Deterministic seeded shuffle split; train gets round(ratio * n) items."""
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    if not instances:
        raise EmptyDataset("nothing to split")
    items = list(instances)
    random.Random(seed).shuffle(items)
    k = round(ratio * len(items))
    return items[:k], items[k:]


# ── IO ─────────────────────────────────────────────────────────────────────


def serialize_instances(instances: Iterable[LocativeInstance]) -> str:
    return "".join(dumps_canonical(inst.to_json()) + "\n" for inst in instances)


def parse_instances(stream) -> list[LocativeInstance]:
    lines = stream.splitlines() if isinstance(stream, str) else stream
    return [LocativeInstance.from_json(json.loads(line))
            for line in lines if line.strip()]


def load_instances(path) -> list[LocativeInstance]:
    with open(path, "r", encoding="utf-8") as f:
        return parse_instances(f)


def save_instances(instances: Iterable[LocativeInstance], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_instances(instances))
