"""Common-ground folding: what the players have publicly established."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gathersix.cards import Card, parse_cards
from gathersix.commonground import (AnnotationEvent, CardFact, InvalidEvent,
                                    apply_annotation_event, empty_common_ground,
                                    load_annotations, parse_annotations,
                                    save_annotations, serialize_annotations,
                                    snapshot_at, validate_against_transcript)
from gathersix.transcripts import Transcript, TranscriptEvent


def ev(seq, kind, asserter="P1", **payload):
    return AnnotationEvent(seq=seq, kind=kind, asserter=asserter, payload=payload)


def fold(events):
    cg = empty_common_ground()
    for e in events:
        cg = apply_annotation_event(cg, e)
    return cg


def test_empty_ground_knows_nothing():
    cg = empty_common_ground()
    assert cg.hands_belief == {"P1": None, "P2": None}
    assert cg.hand_or_empty("P1") == frozenset()
    assert cg.agreed_suit is None
    assert cg.needed["P2"] == frozenset()


def test_hand_assertion_sets_belief():
    cg = fold([ev(2, "hand_is", player="P1", hand=["3H", "4H", "6H"])])
    assert cg.hands_belief["P1"] == frozenset(parse_cards("3H,4H,6H"))
    assert cg.hands_belief["P2"] is None


def test_hand_assertion_last_writer_wins():
    cg = fold([
        ev(2, "hand_is", player="P1", hand=["3H"]),
        ev(4, "hand_is", player="P1", hand=["3H", "4H"]),
    ])
    assert cg.hands_belief["P1"] == frozenset(parse_cards("3H,4H"))


def test_card_moves_between_believed_hands():
    # once P2 claims the 3H, P1's stale claim on it must give way
    cg = fold([
        ev(2, "hand_is", player="P1", hand=["3H", "4H"]),
        ev(4, "hand_is", asserter="P2", player="P2", hand=["3H"]),
    ])
    assert cg.hands_belief["P1"] == frozenset(parse_cards("4H"))
    assert cg.hands_belief["P2"] == frozenset(parse_cards("3H"))


def test_needs_excludes_own_believed_hand():
    cg = fold([
        ev(2, "hand_is", player="P1", hand=["3H"]),
        ev(3, "needs", player="P1", cards=["3H", "5H"]),
    ])
    assert cg.needed["P1"] == frozenset(parse_cards("5H"))
    # and a later hand assertion prunes needs again
    cg = fold([
        ev(2, "needs", player="P1", cards=["3H", "5H"]),
        ev(3, "hand_is", player="P1", hand=["5H"]),
    ])
    assert cg.needed["P1"] == frozenset(parse_cards("3H"))


def test_suit_agreement_and_card_facts():
    cg = fold([
        ev(2, "suit_agreed", suit="H"),
        ev(3, "card_fact_is", card="5H", status="known_at", region="top-left"),
    ])
    assert cg.agreed_suit == "H"
    fact = cg.card_facts[Card("H", 5)]
    assert fact == CardFact(card=Card("H", 5), status="known_at",
                            region="top-left", coord=None)


def test_card_fact_coord_form():
    cg = fold([ev(2, "card_fact_is", card="5H", status="known_at", coord=[3, 2])])
    assert cg.card_facts[Card("H", 5)].coord == (3, 2)


def test_location_and_can_act():
    cg = fold([
        ev(2, "location_is", player="P2", region="bottom-right"),
        ev(3, "can_act", player="P2", value=False),
    ])
    assert cg.locations["P2"] == "bottom-right"
    assert cg.can_act["P2"] is False


def test_invalid_events_rejected():
    with pytest.raises(InvalidEvent):
        fold([ev(1, "hand_is", player="P9", hand=[])])
    with pytest.raises(InvalidEvent):
        fold([ev(1, "hand_is", player="P1", hand=["2H", "3H", "4H", "5H"])])
    with pytest.raises(InvalidEvent):
        fold([ev(1, "suit_agreed", suit="X")])
    with pytest.raises(InvalidEvent):
        fold([ev(1, "card_fact_is", card="5H", status="floating")])
    with pytest.raises(InvalidEvent):
        fold([ev(1, "bogus_kind")])
    with pytest.raises(InvalidEvent):
        fold([AnnotationEvent(seq=1, kind="suit_agreed", asserter="P7",
                              payload={"suit": "H"})])


def test_folding_is_immutable():
    base = empty_common_ground()
    apply_annotation_event(base, ev(2, "suit_agreed", suit="H"))
    assert base.agreed_suit is None


events_st = st.lists(
    st.one_of(
        st.builds(lambda s, p, cards: ev(s, "hand_is", player=p, hand=cards),
                  st.integers(1, 40), st.sampled_from(["P1", "P2"]),
                  st.lists(st.sampled_from(["2H", "3H", "5H", "QD"]),
                           max_size=3, unique=True)),
        st.builds(lambda s: ev(s, "suit_agreed", suit="H"), st.integers(1, 40)),
        st.builds(lambda s, p, cards: ev(s, "needs", player=p, cards=cards),
                  st.integers(1, 40), st.sampled_from(["P1", "P2"]),
                  st.lists(st.sampled_from(["2H", "3H", "5H"]), max_size=3,
                           unique=True)),
    ),
    max_size=12,
).map(lambda evs: sorted(evs, key=lambda e: e.seq))


@given(events_st, st.integers(0, 45))
def test_snapshot_equals_prefix_fold(events, cutoff):
    """Snapshotting at seq k is exactly folding the annotations with seq <= k."""
    prefix = [e for e in events if e.seq <= cutoff]
    assert snapshot_at(events, cutoff) == fold(prefix)


def test_serialization_round_trip(tmp_path):
    events = [
        ev(2, "hand_is", player="P1", hand=["3H", "4H"]),
        ev(3, "suit_agreed", suit="H"),
        ev(5, "card_fact_is", card="5H", status="known_at", region="top-left"),
    ]
    text = serialize_annotations(events)
    assert parse_annotations(text) == events
    path = tmp_path / "ann.jsonl"
    save_annotations(events, path)
    assert load_annotations(path) == events


def test_parse_sorts_by_seq():
    text = (serialize_annotations([ev(5, "suit_agreed", suit="H")])
            + serialize_annotations([ev(2, "suit_agreed", suit="S")]))
    assert [e.seq for e in parse_annotations(text)] == [2, 5]


def test_validate_against_transcript():
    transcript = Transcript(events=(
        TranscriptEvent(1, 250, "system", "board_init", {"transcript_id": "t"}),
        TranscriptEvent(2, 500, "P1", "utterance", {"text": "i have a 3h"}),
    ))
    validate_against_transcript([ev(2, "hand_is", player="P1", hand=["3H"])],
                                transcript)
    with pytest.raises(InvalidEvent):
        validate_against_transcript([ev(9, "suit_agreed", suit="H")], transcript)
