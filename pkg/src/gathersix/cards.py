"""Card identities, text encoding, and the card-expression grammar.

Canonical text form is ``<rank><suit>`` with rank in ``A 2-9 T J Q K`` and
suit in ``C D H S`` (e.g. ``"5H"``, ``"TH"``). Parsing is case-insensitive
and also accepts ``10`` for the ten, because chat text writes both ``th``
and ``10h``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

SUITS = ("C", "D", "H", "S")

SUIT_NAMES = {"C": "clubs", "D": "diamonds", "H": "hearts", "S": "spades"}

RANK_CHARS = {1: "A", 10: "T", 11: "J", 12: "Q", 13: "K"}
CHAR_RANKS = {v: k for k, v in RANK_CHARS.items()}

RANK_WORDS = {
    "ace": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10, "jack": 11,
    "queen": 12, "king": 13,
}

_SUIT_WORD_RE = r"(club|diamond|heart|spade)s?"
_SUIT_BY_WORD = {"club": "C", "diamond": "D", "heart": "H", "spade": "S"}

# Compact form: "5h", "10h", "th", "ks". The standalone token "as" is
# excluded: it is a function word and would match on almost any sentence.
_COMPACT_RE = re.compile(r"\b(10|[2-9]|[atjqk])([cdhs])\b", re.IGNORECASE)

# Verbose form: "5 of hearts", "queen of diamonds", "ace of club".
_VERBOSE_RE = re.compile(
    r"\b(10|[1-9]|ace|two|three|four|five|six|seven|eight|nine|ten"
    r"|jack|queen|king)\s+of\s+" + _SUIT_WORD_RE + r"\b",
    re.IGNORECASE,
)


class CardParseError(ValueError):
    """Text does not encode a card."""


@dataclass(frozen=True, order=True)
class Card:
    """One playing card. ``rank`` is 1..13 with 1 = ace (low), 11..13 = J Q K."""

    suit: str
    rank: int

    def __post_init__(self) -> None:
        if self.suit not in SUITS:
            raise CardParseError(f"bad suit {self.suit!r}")
        if not 1 <= self.rank <= 13:
            raise CardParseError(f"bad rank {self.rank!r}")

    def __str__(self) -> str:
        return f"{RANK_CHARS.get(self.rank, str(self.rank))}{self.suit}"

    def __repr__(self) -> str:
        return f"Card({str(self)!r})"


def parse_card(text: str) -> Card:
    """Parse canonical/compact card text ("5H", "th", "10h") into a Card."""
    s = text.strip().upper()
    m = re.fullmatch(r"(10|[2-9]|[ATJQK])([CDHS])", s)
    if not m:
        raise CardParseError(f"not a card: {text!r}")
    rank_s, suit = m.groups()
    if rank_s in CHAR_RANKS:
        rank = CHAR_RANKS[rank_s]
    elif rank_s == "10":
        rank = 10
    else:
        rank = int(rank_s)
    return Card(suit, rank)


def parse_cards(text: str) -> list[Card]:
    """Parse a comma/space-separated card list, e.g. "2H,3H, 4h"."""
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    return [parse_card(p) for p in parts]


def full_deck() -> tuple[Card, ...]:
    """All 52 cards in (suit, rank) order."""
    return tuple(Card(s, r) for s in SUITS for r in range(1, 14))


def _rank_from_token(tok: str) -> int:
    tok = tok.lower()
    if tok in RANK_WORDS:
        return RANK_WORDS[tok]
    if tok in ("a", "t", "j", "q", "k"):
        return CHAR_RANKS[tok.upper()]
    return int(tok)


def extract_cards(text: str) -> list[Card]:
    """Find every card expression in free chat text, in order, deduped.

    Handles "there is a 5h ..." and "i have a queen of diamonds". The bare
    token "as" never counts as the ace of spades.
    """
    found: list[tuple[int, Card]] = []
    spans: list[tuple[int, int]] = []
    for m in _VERBOSE_RE.finditer(text):
        rank = _rank_from_token(m.group(1))
        suit = _SUIT_BY_WORD[m.group(2).lower()]
        found.append((m.start(), Card(suit, rank)))
        spans.append(m.span())
    for m in _COMPACT_RE.finditer(text):
        if m.group(0).lower() == "as":
            continue
        if any(a <= m.start() < b for a, b in spans):
            continue
        found.append((m.start(), Card(m.group(2).upper(), _rank_from_token(m.group(1)))))
    out: list[Card] = []
    for _, c in sorted(found, key=lambda t: t[0]):
        if c not in out:
            out.append(c)
    return out


def card_list_str(cards) -> str:
    """Canonical comma-joined rendering, sorted by (suit, rank)."""
    return ",".join(str(c) for c in sorted(cards))
