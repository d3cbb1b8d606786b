"""Synthetic game generator for desk-scale pipeline verification.

Two scripted players play real engine games: they walk, pick up and drop
cards, announce hands and strategy (emitting annotation events that match
their true state at that moment), and utter templated locatives about
cards they have seen. The addressee acts on a locative iff the policy's
followup rule fires on the features computed from the common-ground
snapshot at that utterance, with labels flipped at noise_eps; enactment
guarantees that label_followup recovers the emitted label.

Scenario staging controls the joint distribution of (full_hands,
explicit_goal, edit_distance) so that single-feature classifiers order
the same way on synthetic data as on human data: full_hands strongest,
then explicit_goal, then edit_distance.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .agent import coords_to_moves, plan_path
from .cards import Card, RANK_WORDS, SUIT_NAMES
from .commonground import (AnnotationEvent, CommonGround, apply_annotation_event,
                           empty_common_ground, serialize_annotations)
from .corpus import DEFAULT_FOLLOWUP_WINDOW, LocativeInstance, serialize_instances
from .engine import (Drop, GameConfig, GameState, Move, Pickup, Utter,
                     apply_action, new_game)
from .features import featurize
from .regions import region_of
from .straights import STRAIGHT_LEN, Straight
from .transcripts import Transcript, dumps_canonical, serialize_transcript

Coord = tuple[int, int]

DEFAULT_RULE = "full_hands | (explicit_goal & edit_distance <= 3)"

TURNS_PER_GAME = 5
BUDGET_RESERVE = 8

COMMAND_TYPES = ("imperative", "performative", "locative")


class InvalidPolicy(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorPolicy:
    locative_rate: float = 0.95
    command_mix: Mapping[str, float] = field(default_factory=lambda: {
        "imperative": 0.15, "performative": 0.10, "locative": 0.75})
    followup_rule: str = DEFAULT_RULE
    noise_eps: float = 0.0
    seed: int = 0

    def to_json(self) -> dict:
        return {
            "locative_rate": self.locative_rate,
            "command_mix": dict(self.command_mix),
            "followup_rule": self.followup_rule,
            "noise_eps": self.noise_eps,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GeneratorPolicy":
        return cls(
            locative_rate=float(obj.get("locative_rate", 0.95)),
            command_mix=dict(obj.get("command_mix", {
                "imperative": 0.15, "performative": 0.10, "locative": 0.75})),
            followup_rule=obj.get("followup_rule", DEFAULT_RULE),
            noise_eps=float(obj.get("noise_eps", 0.0)),
            seed=int(obj.get("seed", 0)),
        )


def validate_policy(policy: GeneratorPolicy) -> None:
    if not 0 <= policy.locative_rate <= 1:
        raise InvalidPolicy(f"locative_rate {policy.locative_rate} outside [0,1]")
    if not 0 <= policy.noise_eps <= 1:
        raise InvalidPolicy(f"noise_eps {policy.noise_eps} outside [0,1]")
    if set(policy.command_mix) - set(COMMAND_TYPES):
        raise InvalidPolicy(f"unknown command types in mix: {policy.command_mix}")
    total = sum(policy.command_mix.values())
    if abs(total - 1.0) > 1e-9:
        raise InvalidPolicy(f"command_mix sums to {total}, not 1")
    if any(v < 0 for v in policy.command_mix.values()):
        raise InvalidPolicy("negative command_mix weight")
    parse_rule(policy.followup_rule)


# ── followup-rule mini-language ────────────────────────────────────────────
# expr := term ('|' term)* ; term := atom ('&' atom)*
# atom := '(' expr ')' | full_hands | explicit_goal | edit_distance CMP NUM

_RULE_TOKEN = re.compile(
    r"\s*(full_hands|explicit_goal|edit_distance|<=|>=|==|<|>|\(|\)|&|\||"
    r"\d+(?:\.\d+)?)")

_CMPS: dict[str, Callable[[float, float], bool]] = {
    "<=": lambda a, b: a <= b, ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b, "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
}

Rule = Callable[[Mapping[str, float]], bool]


def _rule_tokens(text: str) -> list[str]:
    text = (text.replace("∨", "|").replace("∧", "&")
                .replace("≤", "<=").replace("≥", ">="))
    tokens, pos = [], 0
    while pos < len(text):
        m = _RULE_TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise InvalidPolicy(f"bad rule syntax at {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _RuleParser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise InvalidPolicy("rule ended unexpectedly")
        self.i += 1
        return tok

    def expr(self) -> Rule:
        branches = [self.term()]
        while self.peek() == "|":
            self.take()
            branches.append(self.term())
        return lambda f: any(b(f) for b in branches)

    def term(self) -> Rule:
        conjuncts = [self.atom()]
        while self.peek() == "&":
            self.take()
            conjuncts.append(self.atom())
        return lambda f: all(c(f) for c in conjuncts)

    def atom(self) -> Rule:
        tok = self.take()
        if tok == "(":
            inner = self.expr()
            if self.take() != ")":
                raise InvalidPolicy("unbalanced parentheses in rule")
            return inner
        if tok in ("full_hands", "explicit_goal"):
            return lambda f, name=tok: f[name] >= 0.5
        if tok == "edit_distance":
            cmp_tok = self.take()
            if cmp_tok not in _CMPS:
                raise InvalidPolicy(f"edit_distance needs a comparison, got {cmp_tok!r}")
            bound = float(self.take())
            op = _CMPS[cmp_tok]
            return lambda f: op(f["edit_distance"], bound)
        raise InvalidPolicy(f"unexpected token {tok!r} in rule")


def parse_rule(text: str) -> Rule:
    parser = _RuleParser(_rule_tokens(text))
    rule = parser.expr()
    if parser.peek() is not None:
        raise InvalidPolicy(f"trailing tokens in rule: {parser.tokens[parser.i:]}")
    return rule


# ── utterance templates ────────────────────────────────────────────────────

_REGION_PHRASES = {
    "top-left": ("top left corner", "top left"),
    "top": ("top", "top side"),
    "top-right": ("top right corner", "top right"),
    "left": ("left side", "left"),
    "center": ("middle", "center"),
    "right": ("right side", "right"),
    "bottom-left": ("bottom left corner", "bottom left"),
    "bottom": ("bottom", "bottom side"),
    "bottom-right": ("bottom right corner", "bottom right"),
}

# Confident phrasings lean positive, hedged ones negative; the correlation
# is soft so lexical features carry partial but not decisive signal.
_LOCATIVE_CONFIDENT = (
    "there is a {card} in the very {place}",
    "the {card} is in the {place}",
    "there is a {card} in the {place}",
    "the {cardlong} is in the {place}",
)
_LOCATIVE_HEDGED = (
    "i think there is a {card} in the {place}",
    "there is a {card} somewhere in the {place}",
    "i think the {card} is near the {place}",
    "there is a {cardlong} in the {place}",
)

_HAND_TEMPLATES = ("i have {cards}", "ok i have {cards}", "i have {cards} now")
# {suit} is the plural suit word ("hearts")
_AGREE_TEMPLATES = ("ok so we need to collect {suit} then",
                    "lets collect {suit}",
                    "we should focus on {suit}")
_NEED_TEMPLATES = ("i need the {card}", "i still need the {card}")
_INTENT_TEMPLATES = ("ok i got it :)", "on my way", "i'll get it", "will do")
_CLARIFY_TEMPLATES = ("where exactly?", "which corner?")
_CONFIRM_TEMPLATES = ("got it", "ok i got it :)")
_NEUTRAL_TEMPLATES = ("we have a mess lol", "this board is huge", "hmm ok")
_IMPERATIVE_TEMPLATES = ("go north and keep looking", "keep exploring",
                         "check the {place}")
_PERFORMATIVE_TEMPLATES = ("can you check the {place}",
                           "you should look around")

_RANK_TO_WORD = {rank: word for word, rank in RANK_WORDS.items()
                 if word not in ("a", "1")}


def _card_long(card: Card) -> str:
    return f"{_RANK_TO_WORD[card.rank]} of {SUIT_NAMES[card.suit]}"


# Scenario mix: proportions chosen so full_hands covers most positives,
# explicit_goal overshoots (suit matches with far-apart boards), and raw
# edit distance is the weakest single signal.
_SCENARIOS = (("fh", 0.52), ("eg_low", 0.08), ("eg_high", 0.20), ("off", 0.20))

# Addressee hand recipes for fh scenarios: (straight cards, junk cards).
# Keeping full-hand positives at distance 3..6 stops raw edit distance
# from shadowing the flag, and keeps the log-loss optimum steep enough in
# the distance coordinate to honor the explicit-goal branch of the rule.
_FH_ADDRESSEE = ((0, 0), (0, 1), (0, 1), (0, 2), (0, 2), (0, 3))


@dataclass(frozen=True)
class GameData:
    """One generated game: transcript, annotations, instances, and the
    dense feature vectors the generator used while labeling (kept for
    closed-loop verification)."""

    transcript: Transcript
    annotations: tuple[AnnotationEvent, ...]
    instances: tuple[LocativeInstance, ...]
    dense_features: tuple[tuple[float, float, float], ...]

    @property
    def rule_inputs(self) -> list[dict[str, float]]:
        return [dict(zip(("edit_distance", "explicit_goal", "full_hands"), row))
                for row in self.dense_features]


class _Generator:
    def __init__(self, config: GameConfig, policy: GeneratorPolicy,
                 seed: int, transcript_id: str):
        self.config = config
        self.policy = policy
        self.rng = random.Random(seed)
        self.rule = parse_rule(policy.followup_rule)
        self.state: GameState = new_game(config, seed, transcript_id)
        self.cg: CommonGround = empty_common_ground()
        self.annotations: list[AnnotationEvent] = []
        self.instances: list[LocativeInstance] = []
        self.dense_rows: list[tuple[float, float, float]] = []
        # card → (holder who must not pick it, earliest safe seq)
        self.taboo: dict[Card, tuple[str, int]] = {}
        self.goal_suit = self.rng.choice("CDHS")
        lo = self.rng.randint(1, 13 - STRAIGHT_LEN + 1)
        self.straight = Straight(self.goal_suit, lo)
        self.agreed = False

    # ── engine plumbing ────────────────────────────────────────────────

    def _emit(self, actor: str, action) -> int:
        self.state = apply_action(self.state, actor, action)
        return self.state.event_log[-1].seq

    def _annotate(self, kind: str, asserter: str, payload: dict, seq: int) -> None:
        ann = AnnotationEvent(seq=seq, kind=kind, asserter=asserter, payload=payload)
        self.annotations.append(ann)
        self.cg = apply_annotation_event(self.cg, ann)

    def _player(self, pid: str):
        return self.state.players[pid]

    def _budget_left(self, pid: str) -> int:
        return self.state.move_budget - self._player(pid).moves_used

    def _board_pos(self, card: Card) -> Coord | None:
        for pos, cards in self.state.board.placements.items():
            if card in cards:
                return pos
        return None

    def _board_cards(self) -> list[Card]:
        out = []
        for cards in self.state.board.placements.values():
            out.extend(cards)
        return sorted(out)

    def _walk_to(self, pid: str, target: Coord) -> bool:
        path = plan_path(self.config.width, self.config.height,
                         self.state.board.walls, self._player(pid).pos, target)
        if len(path) - 1 > self._budget_left(pid) - BUDGET_RESERVE:
            return False
        for move in coords_to_moves(path):
            self._emit(pid, move)
        return True

    def _fetch(self, pid: str, card: Card) -> bool:
        pos = self._board_pos(card)
        if pos is None:
            return False
        if not self._walk_to(pid, pos):
            return False
        if len(self._player(pid).hand) >= 3:
            junk = min(self._player(pid).hand)
            self._emit(pid, Drop(junk))
        self._emit(pid, Pickup(card))
        return True

    def _stage_hand(self, pid: str, target: set[Card]) -> None:
        for card in sorted(self._player(pid).hand - target):
            self._emit(pid, Drop(card))
        for card in sorted(target - self._player(pid).hand):
            self._fetch(pid, card)

    def _wander(self, pid: str, steps: int) -> None:
        for _ in range(min(steps, self._budget_left(pid) - BUDGET_RESERVE)):
            x, y = self._player(pid).pos
            options = []
            for d, (dx, dy) in (("north", (0, -1)), ("south", (0, 1)),
                                ("east", (1, 0)), ("west", (-1, 0))):
                if 0 <= x + dx < self.config.width and 0 <= y + dy < self.config.height:
                    options.append(d)
            self._emit(pid, Move(self.rng.choice(options)))

    # ── dialogue helpers ───────────────────────────────────────────────

    def _say(self, pid: str, text: str) -> int:
        return self._emit(pid, Utter(text))

    def _announce_hand(self, pid: str) -> None:
        hand = sorted(self._player(pid).hand)
        if not hand:
            seq = self._say(pid, self.rng.choice(
                ("i have nothing yet", "my hand is empty")))
        else:
            joiner = self.rng.choice((",", ", ", " "))
            text = self.rng.choice(_HAND_TEMPLATES).format(
                cards=joiner.join(str(c).lower() for c in hand))
            seq = self._say(pid, text)
        self._annotate("hand_is", pid, {
            "player": pid, "hand": [str(c) for c in hand]}, seq)

    def _announce_agreement(self) -> None:
        speaker = self.rng.choice(("P1", "P2"))
        text = self.rng.choice(_AGREE_TEMPLATES).format(
            suit=SUIT_NAMES[self.goal_suit])
        seq = self._say(speaker, text)
        self._annotate("suit_agreed", speaker, {"suit": self.goal_suit}, seq)
        self.agreed = True

    def _announce_need(self, pid: str, card: Card) -> None:
        seq = self._say(pid, self.rng.choice(_NEED_TEMPLATES).format(
            card=str(card).lower()))
        self._annotate("needs", pid, {
            "player": pid, "cards": [str(card)]}, seq)

    def _chatter(self, kind: str) -> None:
        speaker = self.rng.choice(("P1", "P2"))
        place = self.rng.choice(_REGION_PHRASES[self.rng.choice(
            tuple(_REGION_PHRASES))])
        pool = (_IMPERATIVE_TEMPLATES if kind == "imperative"
                else _PERFORMATIVE_TEMPLATES)
        self._say(speaker, self.rng.choice(pool).format(place=place))
        self._wander(speaker, self.rng.randint(1, 3))

    # ── scenario staging ───────────────────────────────────────────────

    def _taboo_active(self, card: Card, margin: int = 10) -> bool:
        entry = self.taboo.get(card)
        return entry is not None and self.state.next_seq <= entry[1] + margin

    def _available_for(self, pid: str) -> set[Card]:
        other = "P2" if pid == "P1" else "P1"
        avail = set(self._board_cards()) | set(self._player(pid).hand)
        avail -= set(self._player(other).hand)
        return {c for c in avail
                if not (self._taboo_active(c) and self.taboo[c][0] == pid)}

    def _junk_near(self, pid: str, n: int, used: set[Card]) -> list[Card]:
        px, py = self._player(pid).pos
        scored = []
        for pos, cards in sorted(self.state.board.placements.items()):
            for card in cards:
                if card.suit == self.goal_suit or card in used:
                    continue
                if self._taboo_active(card) and self.taboo[card][0] == pid:
                    continue
                scored.append((abs(pos[0] - px) + abs(pos[1] - py), str(card), card))
        scored.sort()
        return [card for _, _, card in scored[:n]]

    def _mentionable(self, pred) -> Card | None:
        pool = [c for c in self._board_cards()
                if pred(c) and not self._taboo_active(c)]
        return self.rng.choice(pool) if pool else None

    def _scenario_cards(self, kind: str):
        """Pick (mentioned, speaker_target, addressee_target, needs_flag)
        or None when the board cannot stage the scenario."""
        speaker = self.rng.choice(("P1", "P2"))
        addressee = "P2" if speaker == "P1" else "P1"
        sp_avail = self._available_for(speaker)
        ad_avail = self._available_for(addressee)
        t_cards = set(self.straight.cards)

        if kind == "fh":
            mentioned = self._mentionable(lambda c: c in t_cards)
            if mentioned is None:
                return None
            sp_pool = sorted((t_cards & sp_avail) - {mentioned})
            if len(sp_pool) < 3:
                return None
            sp_target = set(self.rng.sample(sp_pool, 3))
            n_straight, n_junk = self.rng.choice(_FH_ADDRESSEE)
            ad_pool = sorted((t_cards & ad_avail) - {mentioned} - sp_target)
            ad_target = set(self.rng.sample(ad_pool, min(n_straight, len(ad_pool))))
            ad_target |= set(self._junk_near(addressee, n_junk, sp_target | ad_target))
            return mentioned, speaker, sp_target, ad_target, False

        if kind == "eg_low":
            mentioned = self._mentionable(lambda c: c in t_cards)
            if mentioned is None:
                return None
            sp_pool = sorted((t_cards & sp_avail) - {mentioned})
            if len(sp_pool) < 2:
                return None
            sp_target = set(self.rng.sample(sp_pool, 2))
            ad_pool = sorted((t_cards & ad_avail) - {mentioned} - sp_target)
            k2 = min(self.rng.randint(1, 2), len(ad_pool))
            if k2 == 0:
                return None
            ad_target = set(self.rng.sample(ad_pool, k2))
            return mentioned, speaker, sp_target, ad_target, False

        if kind == "eg_high":
            needs_flag = self.rng.random() < 0.2
            if needs_flag:
                mentioned = self._mentionable(
                    lambda c: c.suit != self.goal_suit)
            else:
                mentioned = self._mentionable(
                    lambda c: c.suit == self.goal_suit)
            if mentioned is None:
                return None
            # u straight cards + m junk across both hands → distance 6-u+m
            u = self.rng.randint(1, 2)
            m = self.rng.randint(1, 2)
            sp_pool = sorted((t_cards & sp_avail) - {mentioned})
            sp_straight = set(self.rng.sample(sp_pool, min(u, len(sp_pool))))
            sp_junk = self._junk_near(speaker, min(1, m), sp_straight | {mentioned})
            sp_target = sp_straight | set(sp_junk)
            ad_target = set(self._junk_near(
                addressee, m - len(sp_junk), sp_target | {mentioned}))
            return mentioned, speaker, sp_target, ad_target, needs_flag

        # off-suit mention, hands mostly left as they are
        mentioned = self._mentionable(
            lambda c: c.suit != self.goal_suit
            and c not in self.cg.needed.get("P1", frozenset())
            and c not in self.cg.needed.get("P2", frozenset()))
        if mentioned is None:
            return None
        return mentioned, speaker, None, None, False

    # ── locative emission and enactment ────────────────────────────────

    def _emit_locative(self, speaker: str, mentioned: Card) -> int:
        pos = self._board_pos(mentioned)
        assert pos is not None
        region = region_of(pos, self.config.width, self.config.height)
        place = self.rng.choice(_REGION_PHRASES[region])
        # soft lexical correlation with the eventual decision
        fires = self.rule(self._features_now(speaker, mentioned))
        confident = self.rng.random() < (0.75 if fires else 0.25)
        pool = _LOCATIVE_CONFIDENT if confident else _LOCATIVE_HEDGED
        text = self.rng.choice(pool).format(
            card=str(mentioned).lower(), cardlong=_card_long(mentioned),
            place=place)
        seq = self._say(speaker, text)
        self._annotate("card_fact_is", speaker, {
            "card": str(mentioned), "status": "known_at", "region": region}, seq)
        return seq

    def _features_now(self, speaker: str, mentioned: Card) -> dict[str, float]:
        addressee = "P2" if speaker == "P1" else "P1"
        fv = featurize(self.cg, mentioned, speaker, addressee)
        return dict(zip(fv.dense_names, fv.dense))

    def _emit_instance(self, speaker: str, mentioned: Card) -> None:
        addressee = "P2" if speaker == "P1" else "P1"
        seq = self._emit_locative(speaker, mentioned)
        feats = self._features_now(speaker, mentioned)
        fires = self.rule(feats)
        label_positive = fires != (self.rng.random() < self.policy.noise_eps)
        self.instances.append(LocativeInstance(
            transcript_id=self.state.transcript_id, seq=seq, speaker=speaker,
            card=mentioned, label="positive" if label_positive else "negative"))
        self.dense_rows.append((feats["edit_distance"], feats["explicit_goal"],
                                feats["full_hands"]))
        if label_positive:
            self._enact_positive(addressee, mentioned)
        else:
            self.taboo[mentioned] = (addressee, seq + DEFAULT_FOLLOWUP_WINDOW)

    def _run_locative_turn(self, kind: str) -> None:
        picks = self._scenario_cards(kind)
        if picks is None:
            return
        mentioned, speaker, sp_target, ad_target, needs_flag = picks
        addressee = "P2" if speaker == "P1" else "P1"
        if sp_target is not None:
            self._stage_hand(speaker, sp_target)
        if ad_target is not None:
            self._stage_hand(addressee, ad_target)
        if self._board_pos(mentioned) is None:
            return
        if sp_target is not None or self.rng.random() < 0.5:
            self._announce_hand(speaker)
            self._announce_hand(addressee)
        if needs_flag:
            self._announce_need(addressee, mentioned)
        self._emit_instance(speaker, mentioned)

    def _enact_positive(self, addressee: str, mentioned: Card) -> None:
        if self.rng.random() < 0.85:
            self._say(addressee, self.rng.choice(_INTENT_TEMPLATES))
        else:
            self._say(addressee, self.rng.choice(_CLARIFY_TEMPLATES))
        if self._taboo_active(mentioned):
            return
        if self.rng.random() < 0.8 and self._fetch(addressee, mentioned):
            self._say(addressee, self.rng.choice(_CONFIRM_TEMPLATES))

    def run(self) -> GameData:
        self._wander("P1", self.rng.randint(2, 4))
        self._wander("P2", self.rng.randint(2, 4))
        for turn in range(TURNS_PER_GAME):
            if turn == 1 and not self.agreed:
                self._announce_agreement()
            draw = self.rng.random()
            acc, utype = 0.0, "locative"
            for name, w in sorted(self.policy.command_mix.items()):
                acc += w
                if draw < acc:
                    utype = name
                    break
            if utype != "locative":
                self._chatter(utype)
                continue
            if self.rng.random() > self.policy.locative_rate:
                if self.rng.random() < 0.3:
                    self._say(self.rng.choice(("P1", "P2")),
                              self.rng.choice(_NEUTRAL_TEMPLATES))
                continue
            if turn == 0:
                # pre-agreement mention: no goal, hands unannounced
                if self.rng.random() < 0.5:
                    speaker = self.rng.choice(("P1", "P2"))
                    mentioned = self._mentionable(lambda c: True)
                    if mentioned is not None:
                        self._emit_instance(speaker, mentioned)
                continue
            r = self.rng.random()
            acc, kind = 0.0, "off"
            for name, w in _SCENARIOS:
                acc += w
                if r < acc:
                    kind = name
                    break
            self._run_locative_turn(kind)
        return GameData(
            transcript=self.state.transcript(),
            annotations=tuple(self.annotations),
            instances=tuple(self.instances),
            dense_features=tuple(self.dense_rows),
        )


def generate_game(config: GameConfig, policy: GeneratorPolicy, seed: int,
                  transcript_id: str = "g0000") -> GameData:
    """One scripted game; deterministic in (config, policy, seed)."""
    validate_policy(policy)
    return _Generator(config, policy, seed, transcript_id).run()


def generate_games(n_games: int, config: GameConfig, policy: GeneratorPolicy,
                   seed: int | None = None) -> list[GameData]:
    if n_games <= 0:
        raise InvalidPolicy(f"n_games must be positive, got {n_games}")
    validate_policy(policy)
    master = random.Random(policy.seed if seed is None else seed)
    out = []
    for i in range(n_games):
        game_seed = master.randrange(2 ** 31)
        out.append(generate_game(config, policy, game_seed,
                                 transcript_id=f"g{i:04d}"))
    return out


def generate_until(min_instances: int, config: GameConfig,
                   policy: GeneratorPolicy,
                   seed: int | None = None) -> list[GameData]:
    """Generate games until the corpus holds at least min_instances."""
    validate_policy(policy)
    master = random.Random(policy.seed if seed is None else seed)
    games, count, i = [], 0, 0
    while count < min_instances:
        game_seed = master.randrange(2 ** 31)
        game = generate_game(config, policy, game_seed,
                             transcript_id=f"g{i:04d}")
        games.append(game)
        count += len(game.instances)
        i += 1
    return games


def write_corpus(games: Sequence[GameData], out_dir,
                 config: GameConfig, policy: GeneratorPolicy) -> dict:
    """Write transcripts/, annotations/, instances/ and a manifest."""
    root = Path(out_dir)
    for sub in ("transcripts", "annotations", "instances"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    entries = []
    for game in games:
        tid = game.transcript.transcript_id
        paths = {
            "transcript": f"transcripts/{tid}.jsonl",
            "annotations": f"annotations/{tid}.jsonl",
            "instances": f"instances/{tid}.jsonl",
        }
        (root / paths["transcript"]).write_text(
            serialize_transcript(game.transcript), encoding="utf-8")
        (root / paths["annotations"]).write_text(
            serialize_annotations(game.annotations), encoding="utf-8")
        (root / paths["instances"]).write_text(
            serialize_instances(game.instances), encoding="utf-8")
        entries.append({"transcript_id": tid, "n_instances": len(game.instances),
                        **paths})
    manifest = {
        "config": config.to_json(),
        "policy": policy.to_json(),
        "n_games": len(games),
        "files": entries,
    }
    (root / "manifest.json").write_text(
        dumps_canonical(manifest) + "\n", encoding="utf-8")
    return manifest
