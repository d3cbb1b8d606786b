"""Tabular common ground: what the players have publicly established.

The common ground is a snapshot of mutually known game facts at a point
in a transcript: believed hands, player locations, card existence and
location facts, the agreed target suit, cards each player says they need,
and whether each player can currently act. It is built by left-folding
annotation events (one per public assertion) up to a target sequence
number. Conflicting assertions resolve last-writer-wins.

Annotation files are JSONL, one event per line:
``{"seq": int, "kind": str, "asserter": "P1"|"P2", "payload": {...}}``.

Kinds and payloads:

* ``hand_is``      {"player": "P1", "cards": ["3H","4H","6H"]}
* ``location_is``  {"player": "P1", "region": "top-left"} or {"player": ..., "coord": [x,y]}
* ``card_fact_is`` {"card": "5H", "status": "known_at", "region": "top-left"}
                   (status one of unknown/exists_somewhere/known_at/absent;
                    known_at takes "region" and/or "coord")
* ``suit_agreed``  {"suit": "H"}
* ``needs``        {"player": "P2", "cards": ["5H"]}
* ``can_act``      {"player": "P2", "value": false}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .cards import SUITS, Card, parse_card
from .straights import HAND_LIMIT
from .transcripts import PLAYERS, Transcript, dumps_canonical

EVENT_KINDS = ("hand_is", "location_is", "card_fact_is", "suit_agreed", "needs", "can_act")

CARD_STATUSES = ("unknown", "exists_somewhere", "known_at", "absent")


class InvalidEvent(ValueError):
    pass


@dataclass(frozen=True)
class CardFact:
    card: Card
    status: str
    region: Optional[str] = None
    coord: Optional[tuple[int, int]] = None


@dataclass(frozen=True)
class CommonGround:
    hands_belief: dict[str, Optional[frozenset[Card]]]  # None = unknown
    locations: dict[str, Optional[object]]  # region str, (x, y) coord, or None
    card_facts: dict[Card, CardFact]
    agreed_suit: Optional[str]
    needed: dict[str, frozenset[Card]]
    can_act: dict[str, bool]

    def hand_or_empty(self, player: str) -> frozenset[Card]:
        """Believed hand, treating unknown as empty (public commitments only)."""
        hand = self.hands_belief[player]
        return hand if hand is not None else frozenset()


def empty_common_ground() -> CommonGround:
    return CommonGround(
        hands_belief={p: None for p in PLAYERS},
        locations={p: None for p in PLAYERS},
        card_facts={},
        agreed_suit=None,
        needed={p: frozenset() for p in PLAYERS},
        can_act={p: True for p in PLAYERS},
    )


@dataclass(frozen=True)
class AnnotationEvent:
    seq: int
    kind: str
    asserter: str
    payload: dict

    def to_json(self) -> dict:
        return {"seq": self.seq, "kind": self.kind, "asserter": self.asserter,
                "payload": self.payload}


def _payload_player(ev: AnnotationEvent) -> str:
    player = ev.payload.get("player")
    if player not in PLAYERS:
        raise InvalidEvent(f"seq {ev.seq}: unknown player {player!r}")
    return player


def _payload_cards(ev: AnnotationEvent, key: str) -> frozenset[Card]:
    try:
        return frozenset(parse_card(c) for c in ev.payload.get(key, []))
    except ValueError as e:
        raise InvalidEvent(f"seq {ev.seq}: {e}") from e


def apply_annotation_event(cg: CommonGround, ev: AnnotationEvent) -> CommonGround:
    """Fold one assertion into the common ground, last-writer-wins.

    Hand assertions also keep the ownership picture physically sane: a card
    asserted into one hand leaves the other believed hand, and a player's
    needed set never overlaps their own believed hand.
    """
    if ev.asserter not in PLAYERS:
        raise InvalidEvent(f"seq {ev.seq}: unknown asserter {ev.asserter!r}")

    if ev.kind == "hand_is":
        player = _payload_player(ev)
        cards = _payload_cards(ev, "hand")
        if len(cards) > HAND_LIMIT:
            raise InvalidEvent(f"seq {ev.seq}: hand assertion with {len(cards)} cards")
        other = "P2" if player == "P1" else "P1"
        hands = dict(cg.hands_belief)
        hands[player] = cards
        if hands[other] is not None and hands[other] & cards:
            hands[other] = hands[other] - cards
        needed = dict(cg.needed)
        if needed[player] & cards:
            needed[player] = needed[player] - cards
        return replace(cg, hands_belief=hands, needed=needed)

    if ev.kind == "location_is":
        player = _payload_player(ev)
        where: object
        if "coord" in ev.payload:
            where = (int(ev.payload["coord"][0]), int(ev.payload["coord"][1]))
        else:
            where = ev.payload.get("region")
        return replace(cg, locations={**cg.locations, player: where})

    if ev.kind == "card_fact_is":
        try:
            card = parse_card(ev.payload["card"])
        except (KeyError, ValueError) as e:
            raise InvalidEvent(f"seq {ev.seq}: bad card fact: {e}") from e
        status = ev.payload.get("status")
        if status not in CARD_STATUSES:
            raise InvalidEvent(f"seq {ev.seq}: bad card status {status!r}")
        coord = ev.payload.get("coord")
        fact = CardFact(
            card=card, status=status,
            region=ev.payload.get("region"),
            coord=(int(coord[0]), int(coord[1])) if coord is not None else None,
        )
        return replace(cg, card_facts={**cg.card_facts, card: fact})

    if ev.kind == "suit_agreed":
        suit = ev.payload.get("suit")
        if suit not in SUITS:
            raise InvalidEvent(f"seq {ev.seq}: bad suit {suit!r}")
        return replace(cg, agreed_suit=suit)

    if ev.kind == "needs":
        player = _payload_player(ev)
        cards = _payload_cards(ev, "cards")
        hand = cg.hands_belief[player]
        if hand is not None:
            cards = cards - hand
        return replace(cg, needed={**cg.needed, player: cards})

    if ev.kind == "can_act":
        player = _payload_player(ev)
        return replace(cg, can_act={**cg.can_act, player: bool(ev.payload.get("value"))})

    raise InvalidEvent(f"seq {ev.seq}: unknown annotation kind {ev.kind!r}")


def snapshot_at(annotations: Sequence[AnnotationEvent], seq: int) -> CommonGround:
    """Common ground after folding every annotation with event seq <= ``seq``."""
    cg = empty_common_ground()
    for ev in annotations:
        if ev.seq > seq:
            break
        cg = apply_annotation_event(cg, ev)
    return cg


# ── IO ─────────────────────────────────────────────────────────────────────


def parse_annotations(stream) -> list[AnnotationEvent]:
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = stream
    out: list[AnnotationEvent] = []
    for lineno, raw in enumerate(lines, start=1):
        raw = raw.strip()
        if not raw:
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as e:
            raise InvalidEvent(f"line {lineno}: bad JSON: {e.msg}") from e
        for key in ("seq", "kind", "asserter", "payload"):
            if key not in obj:
                raise InvalidEvent(f"line {lineno}: missing {key!r}")
        out.append(AnnotationEvent(seq=int(obj["seq"]), kind=obj["kind"],
                                   asserter=obj["asserter"], payload=obj["payload"]))
    out.sort(key=lambda ev: ev.seq)
    return out


def serialize_annotations(annotations: Iterable[AnnotationEvent]) -> str:
    return "".join(dumps_canonical(ev.to_json()) + "\n" for ev in annotations)


def load_annotations(path) -> list[AnnotationEvent]:
    with open(path, "r", encoding="utf-8") as f:
        return parse_annotations(f)


def save_annotations(annotations: Iterable[AnnotationEvent], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_annotations(annotations))


def validate_against_transcript(annotations: Sequence[AnnotationEvent],
                                transcript: Transcript) -> None:
    """Every annotation must anchor to an existing transcript event."""
    seqs = {ev.seq for ev in transcript.events}
    for ann in annotations:
        if ann.seq not in seqs:
            raise InvalidEvent(f"annotation anchors to missing transcript seq {ann.seq}")
