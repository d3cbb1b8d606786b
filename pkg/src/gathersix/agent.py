"""Live pragmatic partner: reads utterances in context and acts in-game.

The agent keeps a common-ground ledger from what both players have said,
scores incoming locative utterances with a trained classifier, and when
the score clears threshold it navigates to the mentioned card and picks
it up, confirming out loud. Below threshold it just acknowledges; when
the card or its location cannot be parsed it asks for clarification.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .cards import Card, extract_cards, parse_card
from .commonground import (AnnotationEvent, CommonGround, apply_annotation_event,
                           empty_common_ground)
from .corpus import LOCATIVE, tag_command_type
from .engine import (DIRECTIONS, Action, Drop, Move, Pickup, Utter, Wall)
from .features import DENSE_FEATURES, featurize
from .model import LogRegModel, predict_proba
from .regions import parse_region_phrase, region_centroid
from .straights import HAND_LIMIT

Coord = tuple[int, int]

ACT = "act"
ACKNOWLEDGE = "acknowledge"
CLARIFY = "clarify"
IGNORE = "ignore"

CONFIRM_TEXT = "ok i got it :)"
ACK_TEXT = "ok good to know"
CLARIFY_TEXT = "where exactly?"
HANDS_TIED_TEXT = "i would but my hand is full of cards we need"
UNREACHABLE_TEXT = "i can't find a way there"
GONE_TEXT = "hmm it's not there anymore"


class Unreachable(Exception):
    pass


class UnparseableCard(Exception):
    pass


def default_model() -> LogRegModel:
    """Built-in fallback classifier over the three dense features.

    Hand-set weights that fire on full_hands, or on explicit_goal while
    the boards are close (edit distance <= 3); used when no trained model
    file is supplied.
    """
    return LogRegModel(
        feature_names=DENSE_FEATURES,
        weights=(-0.5, 2.5, 6.0),
        bias=-1.0,
        hyperparams={"learning_rate": 0.0, "l2_lambda": 0.0,
                     "epochs": 0, "seed": 0},
    )


@dataclass(frozen=True)
class AgentView:
    """What one seat can know: own position/hand plus remembered sightings."""

    player_id: str
    width: int
    height: int
    pos: Coord
    hand: frozenset[Card]
    known_walls: frozenset[tuple[Coord, Coord]] = frozenset()
    seen_cards: Mapping[Coord, tuple[Card, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class Decision:
    kind: str
    reply: str = ""
    card: Optional[Card] = None
    target: Optional[Coord] = None
    drop_first: Optional[Card] = None
    p: float = 0.0


def plan_path(width: int, height: int,
              walls: Iterable[tuple[Coord, Coord]],
              start: Coord, target: Coord) -> list[Coord]:
    """Shortest cell path by BFS, avoiding the given wall edges.

    Returns the full path including both endpoints. Raises Unreachable
    when every route is blocked.
    """
    blocked = {Wall(a, b).edge for a, b in walls}
    if start == target:
        return [start]
    came_from: dict[Coord, Coord] = {start: start}
    frontier = deque([start])
    while frontier:
        cur = frontier.popleft()
        for dx, dy in DIRECTIONS.values():
            nxt = (cur[0] + dx, cur[1] + dy)
            if not (0 <= nxt[0] < width and 0 <= nxt[1] < height):
                continue
            if nxt in came_from or Wall(cur, nxt).edge in blocked:
                continue
            came_from[nxt] = cur
            if nxt == target:
                path = [nxt]
                while path[-1] != start:
                    path.append(came_from[path[-1]])
                return path[::-1]
            frontier.append(nxt)
    raise Unreachable(f"no route from {start} to {target}")


def coords_to_moves(path: list[Coord]) -> list[Move]:
    moves = []
    for a, b in zip(path, path[1:]):
        delta = (b[0] - a[0], b[1] - a[1])
        direction = next(d for d, v in DIRECTIONS.items() if v == delta)
        moves.append(Move(direction))
    return moves


def _locate(cg: CommonGround, view: AgentView, card: Card,
            text: str) -> Optional[Coord]:
    # Location precedence: exact common-ground coordinate, then region
    # fact, then the region phrase in the utterance itself, then own
    # sighting memory.
    fact = cg.card_facts.get(card)
    if fact is not None and fact.coord is not None:
        return tuple(fact.coord)
    region = fact.region if fact is not None and fact.region else None
    if region is None:
        region = parse_region_phrase(text)
    if region is not None:
        try:
            return region_centroid(region, view.width, view.height)
        except KeyError:
            pass
    for pos, cards in view.seen_cards.items():
        if card in cards:
            return pos
    return None


def interpret_locative(model: LogRegModel, cg: CommonGround, view: AgentView,
                       utterance: str, speaker: str,
                       threshold: float = 0.5,
                       full_hands_mode: str = "mirror") -> Decision:
    """Decide how to respond to a (purported) locative utterance.

    Deterministic in its inputs. The model's feature_names select which
    dense features are computed; bigram models are not supported here.
    """
    if tag_command_type(utterance) != LOCATIVE:
        return Decision(kind=IGNORE)
    cards = extract_cards(utterance)
    if not cards:
        return Decision(kind=CLARIFY, reply=CLARIFY_TEXT)
    mentioned = cards[0]
    addressee = view.player_id
    fv = featurize(cg, mentioned, speaker, addressee,
                   dense_names=model.feature_names,
                   full_hands_mode=full_hands_mode)
    p = predict_proba(model, fv.dense)
    if p < threshold:
        return Decision(kind=ACKNOWLEDGE, reply=ACK_TEXT, card=mentioned, p=p)
    target = _locate(cg, view, mentioned, utterance)
    if target is None:
        return Decision(kind=CLARIFY, reply=CLARIFY_TEXT, card=mentioned, p=p)

    drop_first = None
    if len(view.hand) >= HAND_LIMIT:
        goal_suit = cg.agreed_suit or mentioned.suit
        junk = sorted(c for c in view.hand if c.suit != goal_suit)
        if not junk:
            # Hand already full of goal-relevant cards: report instead of
            # planning an illegal pickup.
            return Decision(kind=ACKNOWLEDGE, reply=HANDS_TIED_TEXT,
                            card=mentioned, p=p)
        drop_first = junk[0]
    return Decision(kind=ACT, reply=CONFIRM_TEXT, card=mentioned,
                    target=target, drop_first=drop_first, p=p)


# ── utterance → common-ground annotation heuristics ────────────────────────

_SUIT_WORDS = {"club": "C", "diamond": "D", "heart": "H", "spade": "S"}

_AGREE_RE = re.compile(
    r"\b(?:collect|go for|gather|focus on)\s+(club|diamond|heart|spade)s?\b",
    re.IGNORECASE)
_HAVE_RE = re.compile(r"\bi\s+have\b|\bmy\s+hand\b|\bi\s+hold\b", re.IGNORECASE)
_EMPTY_RE = re.compile(
    r"\bi\s+have\s+nothing\b|\bmy\s+hand\s+is\s+empty\b", re.IGNORECASE)
_NEED_RE = re.compile(r"\bi\s+(?:still\s+)?need\b", re.IGNORECASE)


def annotations_from_utterance(actor: str, text: str,
                               seq: int) -> list[AnnotationEvent]:
    """Extract the public commitments an utterance makes, if any.

    Pattern-based: hand reports ("i have 3h,4h,6h"), stated needs
    ("i need the 5h"), suit agreements ("ok so we need to collect hearts
    then"), and locative card facts.
    """
    out: list[AnnotationEvent] = []
    cards = extract_cards(text)
    m = _AGREE_RE.search(text)
    if m:
        out.append(AnnotationEvent(
            seq=seq, kind="suit_agreed", asserter=actor,
            payload={"suit": _SUIT_WORDS[m.group(1).lower()]}))
    if _EMPTY_RE.search(text):
        out.append(AnnotationEvent(
            seq=seq, kind="hand_is", asserter=actor,
            payload={"player": actor, "hand": []}))
    elif _NEED_RE.search(text) and cards:
        out.append(AnnotationEvent(
            seq=seq, kind="needs", asserter=actor,
            payload={"player": actor, "cards": [str(c) for c in cards]}))
    elif _HAVE_RE.search(text) and cards and len(cards) <= HAND_LIMIT:
        out.append(AnnotationEvent(
            seq=seq, kind="hand_is", asserter=actor,
            payload={"player": actor, "hand": [str(c) for c in cards]}))
    elif tag_command_type(text) == LOCATIVE and cards:
        region = parse_region_phrase(text)
        payload = {"card": str(cards[0]),
                   "status": "known_at" if region else "exists_somewhere"}
        if region:
            payload["region"] = region
        out.append(AnnotationEvent(
            seq=seq, kind="card_fact_is", asserter=actor, payload=payload))
    return out


# ── stateful executor for live sessions ────────────────────────────────────


class AgentRunner:
    """One seat's brain in a live game: observes events, queues actions.

    The server (or a driver loop) feeds it transcript events and view
    refreshes; ``next_action`` drains the plan one action at a time.
    Bumps reveal walls and trigger a replan toward the same target.
    """

    def __init__(self, player_id: str, model: LogRegModel | None = None,
                 width: int = 0, height: int = 0,
                 threshold: float = 0.5):
        self.player_id = player_id
        self.model = model or default_model()
        self.threshold = threshold
        self.width = width
        self.height = height
        self.pos: Coord = (0, 0)
        self.hand: frozenset[Card] = frozenset()
        self.known_walls: set[tuple[Coord, Coord]] = set()
        self.seen_cards: dict[Coord, tuple[Card, ...]] = {}
        self.cg: CommonGround = empty_common_ground()
        self.pending: deque[Action] = deque()
        self.target_card: Optional[Card] = None
        self.target_pos: Optional[Coord] = None
        self._seq = 0

    def view(self) -> AgentView:
        return AgentView(
            player_id=self.player_id, width=self.width, height=self.height,
            pos=self.pos, hand=self.hand,
            known_walls=frozenset(self.known_walls),
            seen_cards=dict(self.seen_cards))

    def update_view(self, cells: Iterable[Mapping]) -> None:
        """Record a visibility refresh: [{pos, cards, walls}, ...]."""
        for cell in cells:
            pos = (int(cell["pos"][0]), int(cell["pos"][1]))
            self.seen_cards[pos] = tuple(
                parse_card(c) for c in cell.get("cards", ()))
            for direction in cell.get("walls", ()):
                dx, dy = DIRECTIONS[direction]
                self.known_walls.add(
                    Wall(pos, (pos[0] + dx, pos[1] + dy)).edge)
        # A region phrase only gets us near the card; snap the plan onto
        # the exact cell the moment the card is actually sighted.
        if self.target_card is not None:
            for pos, cards in self.seen_cards.items():
                if self.target_card in cards and pos != self.target_pos:
                    self.target_pos = pos
                    self._replan()
                    break

    def observe_event(self, actor: str, kind: str, payload: Mapping) -> None:
        self._seq += 1
        if kind == "utterance":
            self._observe_utterance(actor, payload["text"])
        elif actor != self.player_id:
            return
        elif kind == "move_to":
            self.pos = (int(payload["pos"][0]), int(payload["pos"][1]))
        elif kind == "pickup":
            card = parse_card(payload["card"])
            self.hand = self.hand | {card}
            held = self.seen_cards.get(self.pos)
            if held:
                self.seen_cards[self.pos] = tuple(
                    c for c in held if c != card)
            if card == self.target_card:
                self.target_card = None
                self.target_pos = None
        elif kind == "drop":
            self.hand = self.hand - {parse_card(payload["card"])}
        elif kind == "bump":
            dx, dy = DIRECTIONS[payload["dir"]]
            self.known_walls.add(
                Wall(self.pos, (self.pos[0] + dx, self.pos[1] + dy)).edge)
            self._replan()

    def _observe_utterance(self, actor: str, text: str) -> None:
        for ann in annotations_from_utterance(actor, text, self._seq):
            self.cg = apply_annotation_event(self.cg, ann)
        if actor == self.player_id:
            return
        decision = interpret_locative(
            self.model, self.cg, self.view(), text, speaker=actor,
            threshold=self.threshold)
        if decision.kind == IGNORE:
            return
        self.pending.append(Utter(decision.reply))
        if decision.kind == ACT:
            self.target_card = decision.card
            self.target_pos = decision.target
            if decision.drop_first is not None:
                self.pending.append(Drop(decision.drop_first))
            self._extend_plan_to_target()

    def _extend_plan_to_target(self) -> None:
        assert self.target_pos is not None and self.target_card is not None
        try:
            path = plan_path(self.width, self.height, self.known_walls,
                             self.pos, self.target_pos)
        except Unreachable:
            self.pending.append(Utter(UNREACHABLE_TEXT))
            self.target_card = None
            self.target_pos = None
            return
        self.pending.extend(coords_to_moves(path))
        self.pending.append(Pickup(self.target_card))

    def _replan(self) -> None:
        if self.target_pos is None:
            return
        self.pending = deque(
            a for a in self.pending if isinstance(a, (Utter, Drop)))
        self._extend_plan_to_target()

    def on_action_error(self, code: str) -> None:
        """A submitted action was rejected; abandon the current plan."""
        self.pending.clear()
        if self.target_card is not None:
            self.pending.append(Utter(GONE_TEXT))
        self.target_card = None
        self.target_pos = None

    def next_action(self) -> Optional[Action]:
        if self.pending:
            return self.pending.popleft()
        return None
