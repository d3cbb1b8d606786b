"""Command tagging, follow-up labeling, and instance dataset plumbing."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gathersix.cards import Card, parse_card
from gathersix.corpus import (DEFAULT_FOLLOWUP_WINDOW, IMPERATIVE, LOCATIVE,
                              NEGATIVE, PERFORMATIVE, POSITIVE, EmptyDataset,
                              LocativeInstance, NotAnUtterance, find_instances,
                              is_locative, label_followup, load_instances,
                              mentioned_cards, parse_instances,
                              save_instances, serialize_instances, split,
                              tag_command_type)
from gathersix.transcripts import Transcript, TranscriptEvent


def make_transcript(events):
    """Events as (actor, kind, payload) tuples; board_init is prepended."""
    out = [TranscriptEvent(1, 250, "system", "board_init",
                           {"transcript_id": "t", "seed": 0, "config": {}})]
    for i, (actor, kind, payload) in enumerate(events, start=2):
        out.append(TranscriptEvent(i, i * 250, actor, kind, payload))
    return Transcript(events=tuple(out))


def say(actor, text):
    return (actor, "utterance", {"text": text})


def pickup(actor, card):
    return (actor, "pickup", {"card": card})


# ── command-type cascade ───────────────────────────────────────────────────


@pytest.mark.parametrize("text", [
    "go get the 5h",
    "grab the two of spades",
    "ok so get the 5h",  # fillers skipped
    "please pick up the qd",
    "drop the 9c",
])
def test_imperatives(text):
    assert tag_command_type(text) == IMPERATIVE


@pytest.mark.parametrize("text", [
    "the 5h is in the top left corner",
    "there is a 5h in the very top left corner",
    "a queen of diamonds is near the bottom wall",
    "the 2s is by the left side",
    "there is an ace of hearts at the top",
    "the 5h is on the right side",
])
def test_locatives(text):
    assert tag_command_type(text) == LOCATIVE
    assert is_locative(text)


@pytest.mark.parametrize("text", [
    "you should grab the 2s",
    "maybe you can get the 5h",
    "you go left i go right",
])
def test_performatives(text):
    assert tag_command_type(text) == PERFORMATIVE


@pytest.mark.parametrize("text", [
    "i have 3h 4h and 6h",
    "ok i got it :)",
    "lets collect hearts",  # "lets" is not a filler, so never imperative
    "what do we need",
    "hello",
])
def test_untagged(text):
    assert tag_command_type(text) is None


def test_second_person_blocks_locative():
    # a location frame aimed at the partner is a performative, not a report
    text = "your 5h is in the top left corner"
    assert not is_locative(text)


def test_locative_needs_place_phrase():
    assert tag_command_type("the 5h is mine") is None
    assert tag_command_type("there is a 5h") is None


def test_mentioned_cards_order():
    assert mentioned_cards("the 5h is next to the 2s") == [
        Card("H", 5), Card("S", 2)]


# ── follow-up labeling ─────────────────────────────────────────────────────

LOC = "the 5h is in the top left corner"


def test_addressee_pickup_is_positive():
    t = make_transcript([say("P1", LOC), pickup("P2", "5H")])
    assert label_followup(t, 2, parse_card("5H")) == POSITIVE


def test_speaker_pickup_is_negative():
    t = make_transcript([say("P1", LOC), pickup("P1", "5H")])
    assert label_followup(t, 2, parse_card("5H")) == NEGATIVE


def test_unrelated_pickup_ignored():
    t = make_transcript([say("P1", LOC), pickup("P2", "QD"), pickup("P2", "5H")])
    assert label_followup(t, 2, parse_card("5H")) == POSITIVE


def test_intent_reply_is_positive():
    t = make_transcript([say("P1", LOC), say("P2", "ok i'll grab it")])
    assert label_followup(t, 2, parse_card("5H")) == POSITIVE


def test_clarify_reply_is_positive():
    t = make_transcript([say("P1", LOC), say("P2", "where exactly?")])
    assert label_followup(t, 2, parse_card("5H")) == POSITIVE


def test_speaker_intent_does_not_count():
    # the speaker's own "i'll get it" means the speaker acts: negative
    t = make_transcript([say("P1", LOC), say("P1", "i'll get it myself")])
    assert label_followup(t, 2, parse_card("5H")) == NEGATIVE


def test_next_locative_closes_the_window():
    t = make_transcript([
        say("P1", LOC),
        say("P1", "the 2s is in the bottom right corner"),
        pickup("P2", "5H"),
    ])
    assert label_followup(t, 2, parse_card("5H")) == NEGATIVE


def test_window_expiry_is_negative():
    filler = [say("P2", f"hmm {i}") for i in range(DEFAULT_FOLLOWUP_WINDOW)]
    t = make_transcript([say("P1", LOC)] + filler + [pickup("P2", "5H")])
    assert label_followup(t, 2, parse_card("5H")) == NEGATIVE


def test_pickup_on_window_edge_counts():
    filler = [pickup("P1", "QD") for _ in range(DEFAULT_FOLLOWUP_WINDOW - 1)]
    t = make_transcript([say("P1", LOC)] + filler + [pickup("P2", "5H")])
    assert label_followup(t, 2, parse_card("5H")) == POSITIVE


def test_custom_window():
    t = make_transcript([say("P1", LOC), pickup("P1", "QD"), pickup("P2", "5H")])
    assert label_followup(t, 2, parse_card("5H"), window=1) == NEGATIVE
    assert label_followup(t, 2, parse_card("5H"), window=2) == POSITIVE


def test_label_requires_utterance_event():
    t = make_transcript([pickup("P1", "5H")])
    with pytest.raises(NotAnUtterance):
        label_followup(t, 2, parse_card("5H"))


def test_find_instances_one_per_mentioned_card():
    t = make_transcript([
        say("P1", "the 5h is in the top left corner next to the 2s"),
        pickup("P2", "5H"),
        say("P2", "the qd is in the middle"),
    ])
    instances = find_instances(t)
    assert [(i.seq, str(i.card), i.label) for i in instances] == [
        (2, "5H", POSITIVE),
        (2, "2S", NEGATIVE),  # the partner went for the 5H, not the 2S
        (4, "QD", NEGATIVE),
    ]
    assert instances[0].speaker == "P1"
    assert instances[0].addressee == "P2"
    assert instances[2].speaker == "P2"
    assert instances[0].instance_id == "t:2:5H"


def test_find_instances_skips_imperatives_and_chat():
    t = make_transcript([
        say("P1", "go get the 5h"),
        say("P1", "i have a 3h"),
        pickup("P2", "5H"),
    ])
    assert find_instances(t) == []


# ── split ──────────────────────────────────────────────────────────────────


def test_split_sizes_at_80_20():
    items = list(range(94))
    train, test = split(items, 0.8, seed=0)
    assert (len(train), len(test)) == (75, 19)


def test_split_deterministic_and_partition():
    items = [f"i{n}" for n in range(40)]
    a_train, a_test = split(items, 0.8, seed=7)
    b_train, b_test = split(items, 0.8, seed=7)
    assert a_train == b_train and a_test == b_test
    assert sorted(a_train + a_test) == sorted(items)
    c_train, _ = split(items, 0.8, seed=8)
    assert c_train != a_train


@given(st.integers(2, 200), st.floats(0.05, 0.95), st.integers(0, 99))
def test_split_partitions_any_size(n, ratio, seed):
    items = list(range(n))
    train, test = split(items, ratio, seed)
    assert sorted(train + test) == items
    assert len(train) == round(ratio * n)


def test_split_rejects_bad_inputs():
    with pytest.raises(ValueError):
        split([1, 2], 0.0, seed=0)
    with pytest.raises(ValueError):
        split([1, 2], 1.0, seed=0)
    with pytest.raises(EmptyDataset):
        split([], 0.8, seed=0)


# ── serialization ──────────────────────────────────────────────────────────


def test_instance_round_trip(tmp_path):
    instances = [
        LocativeInstance("t", 2, "P1", parse_card("5H"), POSITIVE),
        LocativeInstance("t", 9, "P2", parse_card("QD"), NEGATIVE),
    ]
    text = serialize_instances(instances)
    assert parse_instances(text) == instances
    path = tmp_path / "inst.jsonl"
    save_instances(instances, path)
    assert load_instances(path) == instances
