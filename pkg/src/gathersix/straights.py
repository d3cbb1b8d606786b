"""Winning straights and the edit distance from a pair of hands to one.

A straight is six consecutive same-suit cards under ace-low ordering, so
there are 8 rank windows (A..6 through 8..K) per suit, 32 straights total.
An edit is one pickup or one drop, each costing 1; the edit distance of a
hand pair is the cheapest way to turn the hands into some straight split
3/3 between the players.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

from .cards import SUITS, Card

HAND_LIMIT = 3
STRAIGHT_LEN = 6


class InvalidHand(ValueError):
    """Hand too large or hands overlap."""


class Infeasible(ValueError):
    """No straight can be completed from the given available cards."""


@dataclass(frozen=True, order=True)
class Straight:
    """Six consecutive cards of one suit; ``lo`` is the lowest rank (1..8)."""

    suit: str
    lo: int

    @property
    def cards(self) -> tuple[Card, ...]:
        return tuple(Card(self.suit, r) for r in range(self.lo, self.lo + STRAIGHT_LEN))

    @property
    def card_set(self) -> frozenset[Card]:
        return _straight_card_set(self.suit, self.lo)

    def __str__(self) -> str:
        return f"{self.cards[0]}..{self.cards[-1]}"


@lru_cache(maxsize=None)
def _straight_card_set(suit: str, lo: int) -> frozenset[Card]:
    return frozenset(Card(suit, r) for r in range(lo, lo + STRAIGHT_LEN))


@dataclass(frozen=True)
class EditResult:
    """Minimal edit count plus every straight achieving it, in (suit, lo) order."""

    cost: int
    optimal_straights: tuple[Straight, ...]


@lru_cache(maxsize=1)
def enumerate_straights() -> tuple[Straight, ...]:
    """All 32 straights, suits in C,D,H,S order, windows low-to-high within a suit."""
    return tuple(Straight(s, lo) for s in SUITS for lo in range(1, 14 - STRAIGHT_LEN + 1))


def _as_hand(cards: Iterable[Card], name: str) -> frozenset[Card]:
    hand = frozenset(cards)
    if len(hand) > HAND_LIMIT:
        raise InvalidHand(f"{name} has {len(hand)} cards, limit is {HAND_LIMIT}")
    return hand


def _validate_hands(hand1: Iterable[Card], hand2: Iterable[Card]) -> tuple[frozenset[Card], frozenset[Card]]:
    h1 = _as_hand(hand1, "hand1")
    h2 = _as_hand(hand2, "hand2")
    if h1 & h2:
        raise InvalidHand(f"hands share cards: {sorted(h1 & h2)}")
    return h1, h2


def straight_cost(straight: Straight, hand1: Iterable[Card], hand2: Iterable[Card]) -> int:
    """Pickups still needed for ``straight`` plus drops of held off-straight cards.

    The cost does not depend on which player ends up with which card: the
    win condition forces a 3/3 split, and since each hand keeps at most 3
    straight cards there is always room to assign every missing card.
    """
    h1, h2 = _validate_hands(hand1, hand2)
    held = h1 | h2
    target = straight.card_set
    return len(target - held) + len(held - target)


def edit_distance(
    hand1: Iterable[Card],
    hand2: Iterable[Card],
    available: Optional[Iterable[Card]] = None,
) -> EditResult:
    """Minimize straight_cost over all straights.

    ``available``, when given, restricts pickups to cards known to exist:
    straights whose missing cards are not all available are skipped, and
    Infeasible is raised if that eliminates every straight.
    """
    h1, h2 = _validate_hands(hand1, hand2)
    held = h1 | h2
    pool = frozenset(available) if available is not None else None

    best = None
    optima: list[Straight] = []
    for s in enumerate_straights():
        target = s.card_set
        if pool is not None and not (target - held) <= pool:
            continue
        cost = len(target - held) + len(held - target)
        if best is None or cost < best:
            best = cost
            optima = [s]
        elif cost == best:
            optima.append(s)
    if best is None:
        raise Infeasible("no straight is completable from the available cards")
    return EditResult(cost=best, optimal_straights=tuple(optima))
