"""Feature extraction for locative-instance classification.

Three dense common-ground features (edit_distance, explicit_goal,
full_hands) plus a sparse bigram baseline over the dialogue history.
Bigram vocabularies are built from training data only; unseen pairs are
silently dropped at featurization time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .cards import Card
from .commonground import CommonGround, snapshot_at
from .straights import HAND_LIMIT, enumerate_straights, edit_distance
from .transcripts import dumps_canonical

DENSE_FEATURES = ("edit_distance", "explicit_goal", "full_hands")

FULL_HANDS_MODES = ("mirror", "hand-not-full")

START_TOKEN = "<s>"
END_TOKEN = "</s>"

_EDGE_PUNCT = ".,!?;:\"'`()[]"


def tokenize(text: str) -> list[str]:
    """Lowercase, whitespace-split, strip edge punctuation.

    All-punctuation tokens (emoticons like ":)") survive whole; card
    expressions like "5h" are plain alphanumerics and untouched.
    """
    out = []
    for raw in text.lower().split():
        tok = raw.strip(_EDGE_PUNCT)
        out.append(tok if tok else raw)
    return out


def utterance_bigrams(text: str) -> list[tuple[str, str]]:
    """Adjacent token pairs with per-utterance boundary markers."""
    toks = [START_TOKEN] + tokenize(text) + [END_TOKEN]
    return list(zip(toks, toks[1:]))


@dataclass(frozen=True)
class BigramVocabulary:
    """Token-pair to dense-id map, frozen after construction."""

    ids: Mapping[tuple[str, str], int]

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return pair in self.ids

    @classmethod
    def build(cls, utterances: Iterable[str]) -> "BigramVocabulary":
        """Vocabulary over every bigram in the given (training) utterances.

        Ids are assigned in sorted pair order, so the same utterance set
        always yields the same vocabulary.
        """
        pairs = set()
        for text in utterances:
            pairs.update(utterance_bigrams(text))
        return cls(ids={p: i for i, p in enumerate(sorted(pairs))})

    def to_json(self) -> dict:
        return {"bigrams": [[a, b, i] for (a, b), i in sorted(
            self.ids.items(), key=lambda kv: kv[1])]}

    @classmethod
    def from_json(cls, obj: dict) -> "BigramVocabulary":
        return cls(ids={(a, b): int(i) for a, b, i in obj["bigrams"]})


def save_vocabulary(vocab: BigramVocabulary, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_canonical(vocab.to_json()) + "\n")


def load_vocabulary(path) -> BigramVocabulary:
    with open(path, "r", encoding="utf-8") as f:
        return BigramVocabulary.from_json(json.load(f))


def bigram_features(history: Sequence[str],
                    vocab: BigramVocabulary) -> dict[int, int]:
    """Bigram counts over all utterances up to and including the locative.

    Pairs outside the vocabulary are dropped, so test-time vectors never
    index beyond the training dimension.
    """
    counts: dict[int, int] = {}
    for text in history:
        for pair in utterance_bigrams(text):
            fid = vocab.ids.get(pair)
            if fid is not None:
                counts[fid] = counts.get(fid, 0) + 1
    return counts


# ── dense common-ground features ───────────────────────────────────────────


def feat_edit_distance(cg: CommonGround) -> float:
    """Minimal pickups+drops to a winning split, over believed hands.

    An Unknown hand is treated as empty: common ground carries only
    public commitments, and no commitment means no credited cards.
    """
    return float(edit_distance(cg.hand_or_empty("P1"), cg.hand_or_empty("P2")).cost)


def feat_explicit_goal(cg: CommonGround, mentioned: Card, addressee: str) -> int:
    """1 iff the mentioned card matches the agreed suit or a stated need."""
    if cg.agreed_suit is not None and mentioned.suit == cg.agreed_suit:
        return 1
    if mentioned in cg.needed.get(addressee, frozenset()):
        return 1
    return 0


def _hand_completes_straight(hand: frozenset[Card], mentioned: Card) -> bool:
    # Speaker-side test: full hand, uniformly of the mentioned suit, and
    # some six-card straight contains all three plus the mentioned card.
    if len(hand) != HAND_LIMIT:
        return False
    if any(c.suit != mentioned.suit for c in hand):
        return False
    want = set(hand) | {mentioned}
    return any(want <= s.card_set for s in enumerate_straights())


def feat_full_hands(cg: CommonGround, mentioned: Card, speaker: str,
                    addressee: str, mode: str = "mirror") -> int:
    """1 iff the speaker's believed hand completes a straight through the
    mentioned card while the addressee's does not.

    The addressee-side reading is configurable: "mirror" re-runs the
    speaker test on the addressee's hand; "hand-not-full" merely requires
    the addressee's hand to have room.
    """
    if mode not in FULL_HANDS_MODES:
        raise ValueError(f"unknown full_hands mode {mode!r}")
    if not _hand_completes_straight(cg.hand_or_empty(speaker), mentioned):
        return 0
    addressee_hand = cg.hand_or_empty(addressee)
    if mode == "mirror":
        blocked = _hand_completes_straight(addressee_hand, mentioned)
    else:
        blocked = len(addressee_hand) >= HAND_LIMIT
    return 0 if blocked else 1


# ── assembled vectors ──────────────────────────────────────────────────────


@dataclass(frozen=True)
class FeatureVector:
    """Dense named reals plus optional sparse bigram counts."""

    dense_names: tuple[str, ...]
    dense: tuple[float, ...]
    sparse: Mapping[int, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "dense": {n: v for n, v in zip(self.dense_names, self.dense)},
            "sparse": {str(k): v for k, v in sorted(self.sparse.items())},
        }


def featurize(cg: CommonGround, mentioned: Card, speaker: str, addressee: str,
              dense_names: Sequence[str] = DENSE_FEATURES,
              history: Sequence[str] = (),
              vocab: BigramVocabulary | None = None,
              full_hands_mode: str = "mirror") -> FeatureVector:
    """Compute the configured dense subset, plus bigrams when a vocab is given."""
    values = []
    for name in dense_names:
        if name == "edit_distance":
            values.append(feat_edit_distance(cg))
        elif name == "explicit_goal":
            values.append(float(feat_explicit_goal(cg, mentioned, addressee)))
        elif name == "full_hands":
            values.append(float(feat_full_hands(
                cg, mentioned, speaker, addressee, mode=full_hands_mode)))
        else:
            raise ValueError(f"unknown dense feature {name!r}")
    sparse = bigram_features(history, vocab) if vocab is not None else {}
    return FeatureVector(dense_names=tuple(dense_names),
                         dense=tuple(values), sparse=sparse)


def utterance_history(transcript, seq: int) -> list[str]:
    """All utterance texts up to and including the given event."""
    return [ev.payload["text"] for ev in transcript.events
            if ev.kind == "utterance" and ev.seq <= seq]


def instance_features(transcript, annotations, instance,
                      dense_names: Sequence[str] = DENSE_FEATURES,
                      vocab: BigramVocabulary | None = None,
                      full_hands_mode: str = "mirror") -> FeatureVector:
    """Features for one labeled instance, from the common-ground snapshot
    at its utterance and (when a vocab is given) the dialogue history."""
    cg = snapshot_at(annotations, instance.seq)
    history = utterance_history(transcript, instance.seq) if vocab else ()
    return featurize(cg, instance.card, instance.speaker, instance.addressee,
                     dense_names=dense_names, history=history, vocab=vocab,
                     full_hands_mode=full_hands_mode)


def feature_row_json(instance_id: str, fv: FeatureVector, label: str) -> dict:
    row = {"instance_id": instance_id, "label": label}
    row.update(fv.to_json())
    return row


def serialize_feature_rows(rows: Iterable[dict]) -> str:
    return "".join(dumps_canonical(r) + "\n" for r in rows)


def parse_feature_rows(stream) -> list[dict]:
    lines = stream.splitlines() if isinstance(stream, str) else stream
    return [json.loads(line) for line in lines if line.strip()]
