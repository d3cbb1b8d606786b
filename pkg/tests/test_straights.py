"""Edit distance to a winning straight, checked against a search oracle.

The oracle is an independent breadth-first search over actual game moves:
a state is the pair of hands, a move picks an available card into a hand
with room or drops a held card, and the goal is any 3/3 split of a full
straight. Whatever the closed-form cost claims must equal what the search
finds, move for move.
"""

import itertools
import time
from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gathersix.cards import Card, parse_cards
from gathersix.straights import (HAND_LIMIT, STRAIGHT_LEN, EditResult,
                                 Infeasible, InvalidHand, Straight,
                                 edit_distance, enumerate_straights,
                                 straight_cost)

# Small enough to search exhaustively, rich enough to contain several
# straights plus never-useful cards: hearts ace through ten, 2S, 3S.
MINI_DECK = tuple(Card("H", r) for r in range(1, 11)) + (Card("S", 2), Card("S", 3))


def h(text):
    return frozenset(parse_cards(text)) if text else frozenset()


def bfs_distances(deck):
    """Moves-to-win for every reachable hand pair, by BFS from the goals.

    Pickups and drops are mutual inverses, so the move graph is undirected
    and one pass from all winning states yields every distance at once.
    """
    deck = frozenset(deck)
    goals = []
    for s in enumerate_straights():
        target = s.card_set
        if not target <= deck:
            continue
        for combo in itertools.combinations(sorted(target), HAND_LIMIT):
            h1 = frozenset(combo)
            goals.append((h1, target - h1))
    dist = {g: 0 for g in goals}
    queue = deque(goals)
    while queue:
        state = queue.popleft()
        h1, h2 = state
        d = dist[state]
        pool = deck - h1 - h2
        neighbors = []
        for c in pool:
            if len(h1) < HAND_LIMIT:
                neighbors.append((h1 | {c}, h2))
            if len(h2) < HAND_LIMIT:
                neighbors.append((h1, h2 | {c}))
        for c in h1:
            neighbors.append((h1 - {c}, h2))
        for c in h2:
            neighbors.append((h1, h2 - {c}))
        for n in neighbors:
            if n not in dist:
                dist[n] = d + 1
                queue.append(n)
    return dist


def test_edit_distance_equals_bfs_over_mini_deck():
    """Exhaustive agreement with the move-count oracle, all small hands."""
    start = time.monotonic()
    dist = bfs_distances(MINI_DECK)
    deck = set(MINI_DECK)
    checked = 0
    for n1 in range(3):
        for h1_tuple in itertools.combinations(sorted(deck), n1):
            h1 = frozenset(h1_tuple)
            rest = sorted(deck - h1)
            for n2 in range(3):
                for h2_tuple in itertools.combinations(rest, n2):
                    h2 = frozenset(h2_tuple)
                    pool = deck - h1 - h2
                    result = edit_distance(h1, h2, available=pool)
                    assert result.cost == dist[(h1, h2)], (h1, h2)
                    checked += 1
    assert checked == 1 + 2 * 12 + 2 * 66 + 12 * 11 + 2 * 12 * 55 + 66 * 45
    assert time.monotonic() - start < 60


def test_worked_example_one_swap():
    result = edit_distance(h("2H,3H,4H"), h("6H,7H"))
    assert result.cost == 1
    assert Straight("H", 2) in result.optimal_straights
    two_to_seven = tuple(Card("H", r) for r in range(2, 8))
    assert any(s.cards == two_to_seven for s in result.optimal_straights)


def test_worked_example_mixed_junk():
    # computed by hand: best straight 2H..7H needs 5H, and QD must go
    assert edit_distance(h("2H,3H,4H"), h("6H,7H,QD")).cost == 2


def test_worked_example_scattered_hands():
    # union {2H,3H,QD,5S}: four pickups for AH..6H or 2H..7H, two drops
    assert edit_distance(h("2H,3H,QD"), h("5S")).cost == 6


def test_empty_hands_cost_six():
    result = edit_distance(frozenset(), frozenset())
    assert result.cost == STRAIGHT_LEN
    assert len(result.optimal_straights) == 32


def test_complete_straight_costs_zero():
    result = edit_distance(h("2H,3H,4H"), h("5H,6H,7H"))
    assert result.cost == 0
    assert result.optimal_straights == (Straight("H", 2),)


def test_available_restriction_changes_answer():
    # without the 5H anywhere, 2H..7H cannot be completed
    pool = frozenset(parse_cards("8H,9H,TH,JH,QH,KH"))
    result = edit_distance(h("2H,3H,4H"), h("6H,7H"), available=pool)
    assert result.cost > 1


def test_available_infeasible():
    with pytest.raises(Infeasible):
        edit_distance(h("2H,3H"), h("5S"), available=frozenset())


def test_straight_cost_single_straight():
    s = Straight("H", 2)
    assert straight_cost(s, h("2H,3H,4H"), h("6H,7H")) == 1
    assert straight_cost(s, h("2H,3H,4H"), h("5H,6H,7H")) == 0
    assert straight_cost(s, h("QD,QS,QC"), frozenset()) == 9


def test_enumerate_straights_layout():
    all_straights = enumerate_straights()
    assert len(all_straights) == 32
    assert all(len(s.cards) == STRAIGHT_LEN for s in all_straights)
    # ace plays low only: the highest window starts at 8 (8..K)
    assert max(s.lo for s in all_straights) == 8
    assert all(s.card_set <= set(s.cards) for s in all_straights)


def test_rejects_oversized_or_overlapping_hands():
    with pytest.raises(InvalidHand):
        edit_distance(h("2H,3H,4H,5H"), frozenset())
    with pytest.raises(InvalidHand):
        edit_distance(h("2H,3H"), h("3H,4H"))


hand_pairs = st.tuples(
    st.frozensets(st.sampled_from(sorted(frozenset(MINI_DECK))), max_size=3),
    st.frozensets(st.sampled_from(sorted(frozenset(MINI_DECK))), max_size=3),
).filter(lambda p: not (p[0] & p[1]))


@given(hand_pairs)
def test_symmetric_in_hand_order(pair):
    h1, h2 = pair
    assert edit_distance(h1, h2).cost == edit_distance(h2, h1).cost


@given(hand_pairs)
@settings(max_examples=50)
def test_zero_cost_iff_union_is_a_straight(pair):
    h1, h2 = pair
    result = edit_distance(h1, h2)
    union = h1 | h2
    is_straight = any(s.card_set == union for s in enumerate_straights())
    assert (result.cost == 0) == is_straight


@given(hand_pairs)
@settings(max_examples=50)
def test_cost_bounds(pair):
    h1, h2 = pair
    cost = edit_distance(h1, h2).cost
    # at worst: drop everything held, pick up a whole straight
    assert 0 <= cost <= STRAIGHT_LEN + len(h1) + len(h2)


@given(hand_pairs)
@settings(max_examples=50)
def test_picking_a_missing_card_reduces_cost_by_one(pair):
    h1, h2 = pair
    if len(h1) >= HAND_LIMIT:
        return
    result = edit_distance(h1, h2)
    if result.cost == 0:
        return
    missing = result.optimal_straights[0].card_set - (h1 | h2)
    if not missing:
        return
    card = sorted(missing)[0]
    assert edit_distance(h1 | {card}, h2).cost == result.cost - 1


def test_result_type_shape():
    result = edit_distance(h("2H"), h("3H"))
    assert isinstance(result, EditResult)
    assert result.cost == 4
    assert all(isinstance(s, Straight) for s in result.optimal_straights)
