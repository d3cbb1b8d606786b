"""Synthetic-dialogue generator: rule language, policies, closed loops.

The load-bearing properties here are the closed loops: every locative the
generator emits must be re-discovered by the corpus tagger, and with zero
label noise the emitted labels must equal the follow-up rule applied to
the feature values the generator computed.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gathersix.commonground import (
    serialize_annotations,
    validate_against_transcript,
)
from gathersix.corpus import NEGATIVE, POSITIVE, find_instances, label_followup
from gathersix.engine import GameConfig, replay_transcript
from gathersix.features import instance_features
from gathersix.simulator import (
    DEFAULT_RULE,
    GeneratorPolicy,
    InvalidPolicy,
    generate_game,
    generate_games,
    generate_until,
    parse_rule,
    validate_policy,
    write_corpus,
)
from gathersix.transcripts import parse_transcript, serialize_transcript

FLAG_COMBOS = [
    {"edit_distance": float(ed), "explicit_goal": float(eg),
     "full_hands": float(fh)}
    for ed in (0.0, 2.0, 3.0, 4.0, 7.0)
    for eg in (0.0, 1.0)
    for fh in (0.0, 1.0)
]


# ── rule mini-language ──────────────────────────────────────────────────────

def test_default_rule_truth_table():
    rule = parse_rule(DEFAULT_RULE)
    for f in FLAG_COMBOS:
        expected = f["full_hands"] >= 0.5 or (
            f["explicit_goal"] >= 0.5 and f["edit_distance"] <= 3)
        assert rule(f) == expected, f


def test_and_binds_tighter_than_or():
    # Without parens the rule must read fh | (eg & ed<=3), not (fh|eg) & ...
    rule = parse_rule("full_hands | explicit_goal & edit_distance <= 3")
    assert rule({"full_hands": 1.0, "explicit_goal": 0.0, "edit_distance": 9.0})
    assert not rule(
        {"full_hands": 0.0, "explicit_goal": 1.0, "edit_distance": 9.0})


def test_parens_override_precedence():
    rule = parse_rule("(full_hands | explicit_goal) & edit_distance <= 3")
    assert not rule(
        {"full_hands": 1.0, "explicit_goal": 0.0, "edit_distance": 9.0})
    assert rule({"full_hands": 0.0, "explicit_goal": 1.0, "edit_distance": 2.0})


def test_unicode_operators_are_aliases():
    ascii_rule = parse_rule(DEFAULT_RULE)
    fancy = parse_rule("full_hands ∨ (explicit_goal ∧ edit_distance ≤ 3)")
    for f in FLAG_COMBOS:
        assert fancy(f) == ascii_rule(f)


@pytest.mark.parametrize("text,key,yes,no", [
    ("edit_distance < 3", "edit_distance", 2.0, 3.0),
    ("edit_distance >= 3", "edit_distance", 3.0, 2.0),
    ("edit_distance > 3", "edit_distance", 4.0, 3.0),
    ("edit_distance == 3", "edit_distance", 3.0, 2.0),
])
def test_comparators(text, key, yes, no):
    rule = parse_rule(text)
    base = {"edit_distance": 0.0, "explicit_goal": 0.0, "full_hands": 0.0}
    assert rule({**base, key: yes})
    assert not rule({**base, key: no})


def test_flags_truthy_at_half():
    rule = parse_rule("full_hands")
    assert rule({"full_hands": 0.5})
    assert not rule({"full_hands": 0.49})


@pytest.mark.parametrize("text", [
    "full_hands |",
    "edit_distance <=",
    "edit_distance 3",
    "(full_hands",
    "full_hands)",
    "full_hands explicit_goal",
    "hands_full",
    "3 <= edit_distance",
    "",
])
def test_bad_rule_syntax(text):
    with pytest.raises(InvalidPolicy):
        parse_rule(text)


# ── policy validation ───────────────────────────────────────────────────────

def test_default_policy_is_valid():
    validate_policy(GeneratorPolicy())


@pytest.mark.parametrize("kwargs", [
    {"locative_rate": -0.1},
    {"locative_rate": 1.5},
    {"noise_eps": -0.01},
    {"noise_eps": 2.0},
    {"command_mix": {"imperative": 0.5, "performative": 0.5, "chant": 0.0}},
    {"command_mix": {"imperative": 0.5, "performative": 0.2, "locative": 0.2}},
    {"command_mix": {"imperative": -0.2, "performative": 0.6, "locative": 0.6}},
    {"followup_rule": "full_hands |"},
])
def test_invalid_policies_rejected(kwargs):
    with pytest.raises(InvalidPolicy):
        validate_policy(GeneratorPolicy(**kwargs))


def test_policy_json_round_trip():
    policy = GeneratorPolicy(locative_rate=0.8, noise_eps=0.1, seed=7)
    assert GeneratorPolicy.from_json(policy.to_json()) == policy


def test_generate_games_rejects_bad_count():
    with pytest.raises(InvalidPolicy):
        generate_games(0, GameConfig(), GeneratorPolicy())


# ── generated corpora ───────────────────────────────────────────────────────

@pytest.fixture(scope="module")
def games():
    return generate_games(6, GameConfig(), GeneratorPolicy(), seed=0)


def test_transcripts_replay_on_the_engine(games):
    # Every emitted event must be a legal action in sequence.
    for game in games:
        state = replay_transcript(game.transcript)
        assert state.event_log[-1].seq == game.transcript.events[-1].seq


def test_generator_and_tagger_agree(games):
    for game in games:
        assert find_instances(game.transcript) == list(game.instances)


def test_emitted_labels_recoverable_from_transcript(games):
    for game in games:
        for inst in game.instances:
            assert label_followup(game.transcript, inst.seq, inst.card) == inst.label


def test_noiseless_labels_equal_rule(games):
    rule = parse_rule(DEFAULT_RULE)
    for game in games:
        assert len(game.instances) == len(game.dense_features)
        for inst, inputs in zip(game.instances, game.rule_inputs):
            expected = POSITIVE if rule(inputs) else NEGATIVE
            assert inst.label == expected


def test_annotations_anchor_to_transcript_events(games):
    for game in games:
        validate_against_transcript(game.annotations, game.transcript)


def test_cached_features_match_pipeline_recomputation(games):
    # The dense rows the generator labeled with must be exactly what the
    # feature pipeline recovers from the written artifacts.
    for game in games:
        for inst, dense in zip(game.instances, game.dense_features):
            fv = instance_features(game.transcript, game.annotations, inst)
            assert tuple(fv.dense) == tuple(dense)


def test_conjunctive_rule_labels_by_construction():
    policy = GeneratorPolicy(followup_rule="full_hands & explicit_goal")
    rule = parse_rule(policy.followup_rule)
    hit = 0
    for game in generate_games(6, GameConfig(), policy, seed=2):
        for inst, inputs in zip(game.instances, game.rule_inputs):
            expected = POSITIVE if rule(inputs) else NEGATIVE
            assert inst.label == expected
            hit += inst.label == POSITIVE
    assert hit > 0


def test_both_labels_and_scenario_spread(games):
    labels = [inst.label for game in games for inst in game.instances]
    assert POSITIVE in labels and NEGATIVE in labels
    eds = {inputs["edit_distance"]
           for game in games for inputs in game.rule_inputs}
    assert len(eds) >= 3


def test_generation_is_deterministic():
    config = GameConfig()
    policy = GeneratorPolicy()
    a = generate_games(2, config, policy, seed=5)
    b = generate_games(2, config, policy, seed=5)
    assert [serialize_transcript(g.transcript) for g in a] == \
           [serialize_transcript(g.transcript) for g in b]
    assert [serialize_annotations(g.annotations) for g in a] == \
           [serialize_annotations(g.annotations) for g in b]
    assert [g.instances for g in a] == [g.instances for g in b]
    c = generate_games(2, config, policy, seed=6)
    assert serialize_transcript(a[0].transcript) != \
        serialize_transcript(c[0].transcript)


def test_seed_defaults_to_policy_seed():
    config = GameConfig()
    a = generate_games(1, config, GeneratorPolicy(seed=9))
    b = generate_games(1, config, GeneratorPolicy(seed=9), seed=9)
    assert serialize_transcript(a[0].transcript) == \
        serialize_transcript(b[0].transcript)


def test_label_noise_flips_a_bounded_fraction():
    config = GameConfig()
    rule = parse_rule(DEFAULT_RULE)
    noisy = generate_until(2000, config, GeneratorPolicy(noise_eps=0.1), seed=0)
    flips = total = 0
    for game in noisy:
        for inst, inputs in zip(game.instances, game.rule_inputs):
            clean = POSITIVE if rule(inputs) else NEGATIVE
            flips += inst.label != clean
            total += 1
    assert total >= 2000
    # eps = 0.1 with ~2000 Bernoulli draws concentrates well inside this band.
    assert 0.08 <= flips / total <= 0.12


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_any_seed_yields_a_parseable_game(seed):
    game = generate_game(GameConfig(), GeneratorPolicy(), seed)
    parsed = parse_transcript(serialize_transcript(game.transcript))
    assert parsed.events == game.transcript.events
    assert game.transcript.events[0].kind == "board_init"


def test_generate_until_reaches_target():
    games = generate_until(12, GameConfig(), GeneratorPolicy(), seed=1)
    assert sum(len(g.instances) for g in games) >= 12


def test_write_corpus_layout(tmp_path, games):
    config = GameConfig()
    policy = GeneratorPolicy()
    manifest = write_corpus(games, tmp_path, config, policy)
    assert manifest["n_games"] == len(games)
    assert (tmp_path / "manifest.json").exists()
    for entry, game in zip(manifest["files"], games):
        tid = game.transcript.transcript_id
        assert entry["transcript_id"] == tid
        assert entry["n_instances"] == len(game.instances)
        raw = (tmp_path / entry["transcript"]).read_text(encoding="utf-8")
        assert parse_transcript(raw).transcript_id == tid
    ids = [e["transcript_id"] for e in manifest["files"]]
    assert len(set(ids)) == len(ids)
