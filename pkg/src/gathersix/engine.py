"""Deterministic state machine for the card-gathering game world.

Two players move on a grid where a deck of cards has been scattered.
Each player holds at most three cards; the pair wins when their hands
together are exactly six consecutive cards of one suit. Some wall
segments are visible, some invisible: walking into either blocks the
move, logs a bump, and (by default) still charges the move budget.
Players never see each other's position and only see cards within a
small Chebyshev neighborhood.

All operations are pure: ``apply_action`` returns a fresh ``GameState``
and never mutates its input, so states can be kept, forked, and replayed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Mapping, Optional

from . import straights
from .cards import Card, full_deck, parse_card
from .transcripts import PLAYERS, Transcript, TranscriptEvent

Coord = tuple[int, int]

DIRECTIONS: dict[str, Coord] = {
    "north": (0, -1),
    "south": (0, 1),
    "east": (1, 0),
    "west": (-1, 0),
}

DEFAULT_WIDTH = 20
DEFAULT_HEIGHT = 15
DEFAULT_MOVE_BUDGET = 200
DEFAULT_VISIBILITY_RADIUS = 2
MIN_DIMENSION = 4
EVENT_TIME_STEP_MS = 250


class InvalidConfig(ValueError):
    pass


class ActionError(Exception):
    """Rejected action; the state passed in is unchanged."""

    code = "ActionError"


class HandFull(ActionError):
    code = "HandFull"


class NoSuchCardHere(ActionError):
    code = "NoSuchCardHere"


class NotInHand(ActionError):
    code = "NotInHand"


class BudgetExhausted(ActionError):
    code = "BudgetExhausted"


class OutOfBounds(ActionError):
    code = "OutOfBounds"


# ── Actions ────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Move:
    direction: str

    def __post_init__(self) -> None:
        if self.direction not in DIRECTIONS:
            raise ValueError(f"bad direction {self.direction!r}")


@dataclass(frozen=True)
class Pickup:
    card: Card


@dataclass(frozen=True)
class Drop:
    card: Card


@dataclass(frozen=True)
class Utter:
    text: str


Action = Move | Pickup | Drop | Utter


# ── Config ─────────────────────────────────────────────────────────────────


def _norm_edge(a: Coord, b: Coord) -> tuple[Coord, Coord]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class Wall:
    """A wall segment on the shared edge of two adjacent cells."""

    a: Coord
    b: Coord
    visible: bool = True

    @property
    def edge(self) -> tuple[Coord, Coord]:
        return _norm_edge(self.a, self.b)


@dataclass(frozen=True)
class Layout:
    """Optional fixed setup for scripted/test games; absent parts are randomized."""

    placements: Optional[Mapping[Coord, tuple[Card, ...]]] = None
    positions: Optional[Mapping[str, Coord]] = None


@dataclass(frozen=True)
class GameConfig:
    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT
    deck: tuple[Card, ...] = ()
    walls: tuple[Wall, ...] = ()
    move_budget: int = DEFAULT_MOVE_BUDGET
    visibility_radius: int = DEFAULT_VISIBILITY_RADIUS
    charge_bumps: bool = True
    layout: Optional[Layout] = None

    def __post_init__(self) -> None:
        if not self.deck:
            object.__setattr__(self, "deck", full_deck())

    def to_json(self) -> dict:
        out: dict = {
            "width": self.width,
            "height": self.height,
            "deck": [str(c) for c in self.deck],
            "walls": [
                {"from": list(w.a), "to": list(w.b), "visible": w.visible}
                for w in self.walls
            ],
            "move_budget": self.move_budget,
            "visibility_radius": self.visibility_radius,
            "charge_bumps": self.charge_bumps,
        }
        if self.layout is not None:
            layout: dict = {}
            if self.layout.placements is not None:
                layout["placements"] = {
                    f"{x},{y}": [str(c) for c in cards]
                    for (x, y), cards in sorted(self.layout.placements.items())
                }
            if self.layout.positions is not None:
                layout["positions"] = {
                    p: list(pos) for p, pos in sorted(self.layout.positions.items())
                }
            out["layout"] = layout
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "GameConfig":
        deck = tuple(parse_card(c) for c in obj.get("deck", [str(c) for c in full_deck()]))
        walls = tuple(
            Wall(
                a=(int(w["from"][0]), int(w["from"][1])),
                b=(int(w["to"][0]), int(w["to"][1])),
                visible=bool(w["visible"]),
            )
            for w in obj.get("walls", [])
        )
        layout = None
        if "layout" in obj and obj["layout"]:
            lo = obj["layout"]
            placements = None
            if "placements" in lo:
                placements = {
                    tuple(int(v) for v in key.split(",")): tuple(parse_card(c) for c in cards)
                    for key, cards in lo["placements"].items()
                }
            positions = None
            if "positions" in lo:
                positions = {
                    p: (int(pos[0]), int(pos[1])) for p, pos in lo["positions"].items()
                }
            layout = Layout(placements=placements, positions=positions)
        return cls(
            width=int(obj.get("width", DEFAULT_WIDTH)),
            height=int(obj.get("height", DEFAULT_HEIGHT)),
            deck=deck,
            walls=walls,
            move_budget=int(obj.get("move_budget", DEFAULT_MOVE_BUDGET)),
            visibility_radius=int(obj.get("visibility_radius", DEFAULT_VISIBILITY_RADIUS)),
            charge_bumps=bool(obj.get("charge_bumps", True)),
            layout=layout,
        )


def validate_config(config: GameConfig) -> None:
    if config.width < MIN_DIMENSION or config.height < MIN_DIMENSION:
        raise InvalidConfig(
            f"board must be at least {MIN_DIMENSION}x{MIN_DIMENSION}, "
            f"got {config.width}x{config.height}"
        )
    seen: set[Card] = set()
    for c in config.deck:
        if c in seen:
            raise InvalidConfig(f"duplicate card in deck: {c}")
        seen.add(c)
    if not set(config.deck) <= set(full_deck()):
        raise InvalidConfig("deck contains cards outside the 52-card deck")
    if config.move_budget < 0:
        raise InvalidConfig("move_budget must be >= 0")
    if config.visibility_radius < 0:
        raise InvalidConfig("visibility_radius must be >= 0")
    for w in config.walls:
        for cell in (w.a, w.b):
            if not (0 <= cell[0] < config.width and 0 <= cell[1] < config.height):
                raise InvalidConfig(f"wall endpoint {cell} out of bounds")
        dx, dy = abs(w.a[0] - w.b[0]), abs(w.a[1] - w.b[1])
        if dx + dy != 1:
            raise InvalidConfig(f"wall {w.a}-{w.b} must join two adjacent cells")
    if config.layout is not None:
        _validate_layout(config)


def _validate_layout(config: GameConfig) -> None:
    layout = config.layout
    assert layout is not None
    if layout.placements is not None:
        placed: list[Card] = []
        for cell, cards in layout.placements.items():
            if not (0 <= cell[0] < config.width and 0 <= cell[1] < config.height):
                raise InvalidConfig(f"placement cell {cell} out of bounds")
            placed.extend(cards)
        if len(set(placed)) != len(placed):
            raise InvalidConfig("layout places a card twice")
        if set(placed) != set(config.deck):
            raise InvalidConfig("layout placements must cover the deck exactly")
    if layout.positions is not None:
        if set(layout.positions) != set(PLAYERS):
            raise InvalidConfig("layout positions must name P1 and P2")
        pos = list(layout.positions.values())
        if pos[0] == pos[1]:
            raise InvalidConfig("players must start on distinct cells")
        for cell in pos:
            if not (0 <= cell[0] < config.width and 0 <= cell[1] < config.height):
                raise InvalidConfig(f"player position {cell} out of bounds")


# ── State ──────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Board:
    width: int
    height: int
    walls: frozenset[tuple[Coord, Coord]]
    visible_walls: frozenset[tuple[Coord, Coord]]
    placements: Mapping[Coord, tuple[Card, ...]]

    def in_bounds(self, cell: Coord) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def blocked(self, a: Coord, b: Coord) -> bool:
        return _norm_edge(a, b) in self.walls

    def cards_at(self, cell: Coord) -> tuple[Card, ...]:
        return self.placements.get(cell, ())


@dataclass(frozen=True)
class PlayerState:
    id: str
    pos: Coord
    hand: frozenset[Card]
    moves_used: int


@dataclass(frozen=True)
class CellView:
    """One cell as a player sees it: its cards plus visible walls on its edges."""

    pos: Coord
    cards: tuple[Card, ...]
    walls: tuple[str, ...]  # directions toward which a visible wall blocks


@dataclass(frozen=True)
class GameState:
    config: GameConfig
    board: Board
    players: Mapping[str, PlayerState]
    event_log: tuple[TranscriptEvent, ...]
    rng_seed: int
    transcript_id: str

    @property
    def move_budget(self) -> int:
        return self.config.move_budget

    def player(self, player_id: str) -> PlayerState:
        if player_id not in self.players:
            raise KeyError(f"no such player {player_id!r}")
        return self.players[player_id]

    def partner_of(self, player_id: str) -> str:
        return "P2" if player_id == "P1" else "P1"

    @property
    def next_seq(self) -> int:
        return self.event_log[-1].seq + 1 if self.event_log else 1

    def transcript(self) -> Transcript:
        return Transcript(events=self.event_log)


def _log(state: GameState, actor: str, kind: str, payload: dict,
         time_ms: Optional[int] = None) -> tuple[TranscriptEvent, ...]:
    seq = state.next_seq
    if time_ms is None:
        time_ms = seq * EVENT_TIME_STEP_MS
    ev = TranscriptEvent(seq=seq, time=time_ms, actor=actor, kind=kind, payload=payload)
    return state.event_log + (ev,)


def new_game(config: GameConfig, seed: int, transcript_id: str = "") -> GameState:
    """Scatter the deck and both players onto the board, deterministically in (config, seed)."""
    validate_config(config)
    rng = random.Random(seed)
    w, h = config.width, config.height

    placements: dict[Coord, tuple[Card, ...]] = {}
    if config.layout is not None and config.layout.placements is not None:
        placements = {cell: tuple(cards) for cell, cards in config.layout.placements.items()}
    else:
        for card in config.deck:
            cell = (rng.randrange(w), rng.randrange(h))
            placements[cell] = placements.get(cell, ()) + (card,)

    if config.layout is not None and config.layout.positions is not None:
        positions = dict(config.layout.positions)
    else:
        p1 = (rng.randrange(w), rng.randrange(h))
        p2 = p1
        while p2 == p1:
            p2 = (rng.randrange(w), rng.randrange(h))
        positions = {"P1": p1, "P2": p2}

    walls = frozenset(wl.edge for wl in config.walls)
    visible_walls = frozenset(wl.edge for wl in config.walls if wl.visible)
    board = Board(width=w, height=h, walls=walls, visible_walls=visible_walls,
                  placements=placements)
    players = {
        p: PlayerState(id=p, pos=positions[p], hand=frozenset(), moves_used=0)
        for p in PLAYERS
    }
    init = TranscriptEvent(
        seq=1, time=EVENT_TIME_STEP_MS, actor="system", kind="board_init",
        payload={"transcript_id": transcript_id, "seed": seed, "config": config.to_json()},
    )
    return GameState(
        config=config, board=board, players=players,
        event_log=(init,), rng_seed=seed, transcript_id=transcript_id,
    )


def apply_action(state: GameState, actor: str, action: Action,
                 time_ms: Optional[int] = None) -> GameState:
    """Apply one action, returning the successor state.

    Raises an ActionError subclass on a rejected action; the input state is
    never modified either way.
    """
    player = state.player(actor)

    if isinstance(action, Utter):
        log = _log(state, actor, "utterance", {"text": action.text}, time_ms)
        return replace(state, event_log=log)

    if isinstance(action, Move):
        if player.moves_used >= state.move_budget:
            raise BudgetExhausted(f"{actor} has used all {state.move_budget} moves")
        dx, dy = DIRECTIONS[action.direction]
        dest = (player.pos[0] + dx, player.pos[1] + dy)
        if not state.board.in_bounds(dest):
            raise OutOfBounds(f"move {action.direction} from {player.pos} leaves the board")
        if state.board.blocked(player.pos, dest):
            moved = player if not state.config.charge_bumps else replace(
                player, moves_used=player.moves_used + 1)
            log = _log(state, actor, "bump", {"dir": action.direction}, time_ms)
            return replace(state, players={**state.players, actor: moved}, event_log=log)
        moved = replace(player, pos=dest, moves_used=player.moves_used + 1)
        log = _log(state, actor, "move_to", {"pos": list(dest)}, time_ms)
        return replace(state, players={**state.players, actor: moved}, event_log=log)

    if isinstance(action, Pickup):
        here = state.board.cards_at(player.pos)
        if action.card not in here:
            raise NoSuchCardHere(f"{action.card} is not at {player.pos}")
        if len(player.hand) >= straights.HAND_LIMIT:
            raise HandFull(f"{actor} already holds {straights.HAND_LIMIT} cards")
        remaining = tuple(c for c in here if c != action.card)
        placements = dict(state.board.placements)
        if remaining:
            placements[player.pos] = remaining
        else:
            del placements[player.pos]
        board = replace(state.board, placements=placements)
        updated = replace(player, hand=player.hand | {action.card})
        log = _log(state, actor, "pickup", {"card": str(action.card)}, time_ms)
        return replace(state, board=board,
                       players={**state.players, actor: updated}, event_log=log)

    if isinstance(action, Drop):
        if action.card not in player.hand:
            raise NotInHand(f"{actor} does not hold {action.card}")
        placements = dict(state.board.placements)
        placements[player.pos] = placements.get(player.pos, ()) + (action.card,)
        board = replace(state.board, placements=placements)
        updated = replace(player, hand=player.hand - {action.card})
        log = _log(state, actor, "drop", {"card": str(action.card)}, time_ms)
        return replace(state, board=board,
                       players={**state.players, actor: updated}, event_log=log)

    raise TypeError(f"unknown action {action!r}")


def visible_neighborhood(state: GameState, player_id: str) -> tuple[CellView, ...]:
    """Cells within Chebyshev distance ``visibility_radius`` of the player.

    Invisible walls and the partner's position are never part of the result.
    """
    player = state.player(player_id)
    r = state.config.visibility_radius
    px, py = player.pos
    cells: list[CellView] = []
    for y in range(max(0, py - r), min(state.board.height, py + r + 1)):
        for x in range(max(0, px - r), min(state.board.width, px + r + 1)):
            dirs = []
            for d, (dx, dy) in DIRECTIONS.items():
                n = (x + dx, y + dy)
                if state.board.in_bounds(n) and _norm_edge((x, y), n) in state.board.visible_walls:
                    dirs.append(d)
            cells.append(CellView(pos=(x, y), cards=state.board.cards_at((x, y)),
                                  walls=tuple(sorted(dirs))))
    return tuple(cells)


def check_win(state: GameState) -> Optional[straights.Straight]:
    """The winning straight if both hands together are exactly one, else None."""
    union = state.players["P1"].hand | state.players["P2"].hand
    if len(union) != straights.STRAIGHT_LEN:
        return None
    if len(state.players["P1"].hand) + len(state.players["P2"].hand) != len(union):
        return None
    for s in straights.enumerate_straights():
        if s.card_set == union:
            return s
    return None


def all_cards_in_play(state: GameState) -> list[Card]:
    """Every card on the board or in a hand (used by conservation checks)."""
    out: list[Card] = []
    for cards in state.board.placements.values():
        out.extend(cards)
    for p in PLAYERS:
        out.extend(state.players[p].hand)
    return out


# ── Replay ─────────────────────────────────────────────────────────────────


def _action_from_event(prev: GameState, ev: TranscriptEvent) -> Action:
    if ev.kind == "utterance":
        return Utter(ev.payload["text"])
    if ev.kind == "pickup":
        return Pickup(parse_card(ev.payload["card"]))
    if ev.kind == "drop":
        return Drop(parse_card(ev.payload["card"]))
    if ev.kind == "bump":
        return Move(ev.payload["dir"])
    if ev.kind == "move_to":
        pos = tuple(ev.payload["pos"])
        cur = prev.player(ev.actor).pos
        delta = (pos[0] - cur[0], pos[1] - cur[1])
        for d, v in DIRECTIONS.items():
            if v == delta:
                return Move(d)
        raise ValueError(f"move_to {pos} is not one step from {cur}")
    raise ValueError(f"event kind {ev.kind!r} is not an action")


def replay_transcript(transcript: Transcript) -> GameState:
    """Re-run a transcript through the engine, asserting it is action-legal.

    Returns the final state; raises if any event cannot be reproduced.
    """
    init = transcript.board_init
    config = GameConfig.from_json(init.payload["config"])
    state = new_game(config, seed=init.payload["seed"],
                     transcript_id=init.payload.get("transcript_id", ""))
    for ev in transcript.events[1:]:
        action = _action_from_event(state, ev)
        state = apply_action(state, ev.actor, action, time_ms=ev.time)
        got = state.event_log[-1]
        if (got.kind, got.actor) != (ev.kind, ev.actor) or got.payload != ev.payload:
            raise ValueError(f"replay diverged at seq {ev.seq}: {got} != {ev}")
    return state


# ── Serialization ──────────────────────────────────────────────────────────


def state_to_json(state: GameState) -> dict:
    return {
        "transcript_id": state.transcript_id,
        "rng_seed": state.rng_seed,
        "config": state.config.to_json(),
        "placements": {
            f"{x},{y}": [str(c) for c in cards]
            for (x, y), cards in sorted(state.board.placements.items())
        },
        "players": {
            p: {
                "pos": list(ps.pos),
                "hand": sorted(str(c) for c in ps.hand),
                "moves_used": ps.moves_used,
            }
            for p, ps in sorted(state.players.items())
        },
        "events": [ev.to_json() for ev in state.event_log],
    }
