"""Command-line front door: simulate, label, featurize, train, eval, serve.

The data pipeline is file-based JSONL so every stage can be inspected or
swapped out: ``simulate`` writes a corpus directory, ``split`` fixes a
train/test partition by instance id, ``features`` turns instances into
feature rows, ``train`` fits the classifier, ``eval`` scores it, and
``serve`` hosts live games for the web client.
"""

from __future__ import annotations

import json
from pathlib import Path

import click
import numpy as np

from . import corpus, features, model as model_mod, simulator
from .cards import parse_card
from .commonground import load_annotations
from .engine import GameConfig
from .straights import Infeasible, edit_distance
from .transcripts import dumps_canonical, load_transcript


def _parse_hand(text: str) -> list:
    text = text.strip()
    if not text or text in ("-", "none"):
        return []
    return [parse_card(tok) for tok in text.replace(",", " ").split()]


@click.group()
def cli() -> None:
    """Card-gathering dialogue game: data, model, and live-play tools."""


@cli.command("edit-distance")
@click.argument("hand1")
@click.argument("hand2")
@click.option("--available", default=None,
              help="Restrict pickups to these cards (comma separated).")
def edit_distance_cmd(hand1: str, hand2: str, available: str | None) -> None:
    """Cards-to-swap distance between two hands and a winning straight.

    Hands are comma separated card codes; use '-' for an empty hand.
    """
    pool = _parse_hand(available) if available is not None else None
    try:
        result = edit_distance(_parse_hand(hand1), _parse_hand(hand2),
                               available=pool)
    except Infeasible as e:
        raise click.ClickException(str(e))
    click.echo(f"cost: {result.cost}")
    for s in result.optimal_straights:
        click.echo(f"  straight: {' '.join(str(c) for c in s.cards)}")


@cli.command()
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--instances", "min_instances", type=int, default=None,
              help="Generate games until this many labeled instances exist.")
@click.option("--games", "n_games", type=int, default=50)
@click.option("--seed", type=int, default=0)
@click.option("--noise-eps", type=float, default=0.0)
@click.option("--rule", default=simulator.DEFAULT_RULE, show_default=True)
@click.option("--locative-rate", type=float, default=0.95)
def simulate(out_dir: str, min_instances: int | None, n_games: int,
             seed: int, noise_eps: float, rule: str,
             locative_rate: float) -> None:
    """Generate a synthetic corpus (transcripts, annotations, instances)."""
    policy = simulator.GeneratorPolicy(
        locative_rate=locative_rate, followup_rule=rule,
        noise_eps=noise_eps, seed=seed)
    config = GameConfig()
    try:
        if min_instances is not None:
            games = simulator.generate_until(min_instances, config, policy)
        else:
            games = simulator.generate_games(n_games, config, policy)
    except simulator.InvalidPolicy as e:
        raise click.ClickException(str(e))
    manifest = simulator.write_corpus(games, out_dir, config, policy)
    n_inst = sum(f["n_instances"] for f in manifest["files"])
    n_pos = sum(1 for g in games for i in g.instances
                if i.label == corpus.POSITIVE)
    click.echo(f"wrote {len(games)} games, {n_inst} instances "
               f"({n_pos} positive) to {out_dir}")


@cli.command()
@click.argument("transcript_path", type=click.Path(exists=True))
@click.option("--window", type=int, default=corpus.DEFAULT_FOLLOWUP_WINDOW,
              show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write instance JSONL here instead of stdout.")
def label(transcript_path: str, window: int, out_path: str | None) -> None:
    """Find locative mentions in a transcript and label their follow-ups."""
    transcript = load_transcript(transcript_path)
    instances = corpus.find_instances(transcript, window=window)
    text = corpus.serialize_instances(instances)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {len(instances)} instances to {out_path}")
    else:
        click.echo(text, nl=False)


def _load_corpus(corpus_dir: str):
    """Yield (transcript, annotations, instances) per game in the manifest."""
    root = Path(corpus_dir)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise click.ClickException(f"no manifest.json under {corpus_dir}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    for entry in manifest["files"]:
        yield (load_transcript(root / entry["transcript"]),
               load_annotations(root / entry["annotations"]),
               corpus.load_instances(root / entry["instances"]))


@cli.command()
@click.argument("corpus_dir", type=click.Path(exists=True))
@click.option("--ratio", type=float, default=0.8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def split(corpus_dir: str, ratio: float, seed: int, out_path: str) -> None:
    """Fix a train/test split of a corpus, written as instance-id lists."""
    instances = [i for _, _, insts in _load_corpus(corpus_dir) for i in insts]
    try:
        train_insts, test_insts = corpus.split(instances, ratio, seed)
    except (ValueError, corpus.EmptyDataset) as e:
        raise click.ClickException(str(e))
    payload = {"ratio": ratio, "seed": seed,
               "train": [i.instance_id for i in train_insts],
               "test": [i.instance_id for i in test_insts]}
    Path(out_path).write_text(dumps_canonical(payload) + "\n",
                              encoding="utf-8")
    click.echo(f"split {len(instances)} instances into "
               f"{len(train_insts)} train / {len(test_insts)} test")


@cli.command("features")
@click.argument("corpus_dir", type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--split", "split_path", type=click.Path(exists=True),
              default=None, help="Instance-id split file from 'split'.")
@click.option("--subset", type=click.Choice(["train", "test"]),
              default=None, help="Which side of the split to featurize.")
@click.option("--dense", default=",".join(features.DENSE_FEATURES),
              show_default=True, help="Comma list of dense features.")
@click.option("--vocab", "vocab_path", type=click.Path(exists=True),
              default=None, help="Apply an existing bigram vocabulary.")
@click.option("--fit-vocab", "fit_vocab_path", type=click.Path(),
              default=None,
              help="Fit a bigram vocabulary on the selected instances' "
                   "dialogue histories and write it here.")
@click.option("--full-hands-mode", type=click.Choice(["mirror", "hand-not-full"]),
              default="mirror", show_default=True)
def features_cmd(corpus_dir: str, out_path: str, split_path: str | None,
                 subset: str | None, dense: str, vocab_path: str | None,
                 fit_vocab_path: str | None, full_hands_mode: str) -> None:
    """Compute feature rows (JSONL) for a corpus's labeled instances."""
    if (split_path is None) != (subset is None):
        raise click.ClickException("--split and --subset go together")
    if vocab_path and fit_vocab_path:
        raise click.ClickException("pass either --vocab or --fit-vocab")
    keep = None
    if split_path:
        split_obj = json.loads(Path(split_path).read_text(encoding="utf-8"))
        keep = set(split_obj[subset])

    dense_names = tuple(n for n in dense.split(",") if n)
    games = list(_load_corpus(corpus_dir))
    selected = []  # (transcript, annotations, instance)
    for transcript, annotations, instances in games:
        for inst in instances:
            if keep is None or inst.instance_id in keep:
                selected.append((transcript, annotations, inst))
    if not selected:
        raise click.ClickException("no instances selected")

    vocab = None
    if vocab_path:
        vocab = features.load_vocabulary(vocab_path)
    elif fit_vocab_path:
        texts = []
        for transcript, _, inst in selected:
            texts.extend(features.utterance_history(transcript, inst.seq))
        vocab = features.BigramVocabulary.build(texts)
        features.save_vocabulary(vocab, fit_vocab_path)
        click.echo(f"fit vocabulary of {len(vocab)} bigrams "
                   f"-> {fit_vocab_path}")

    rows = []
    for transcript, annotations, inst in selected:
        fv = features.instance_features(
            transcript, annotations, inst, dense_names=dense_names,
            vocab=vocab, full_hands_mode=full_hands_mode)
        rows.append(features.feature_row_json(inst.instance_id, fv, inst.label))
    Path(out_path).write_text(features.serialize_feature_rows(rows),
                              encoding="utf-8")
    click.echo(f"wrote {len(rows)} feature rows to {out_path}")


def _feature_names(rows: list[dict], vocab_size: int) -> tuple[str, ...]:
    names = [n for n in features.DENSE_FEATURES if n in rows[0]["dense"]]
    names += [n for n in sorted(rows[0]["dense"]) if n not in names]
    names += [f"bigram_{i}" for i in range(vocab_size)]
    return tuple(names)


def _matrix(rows: list[dict], names) -> np.ndarray:
    X = np.zeros((len(rows), len(names)))
    for i, row in enumerate(rows):
        dense, sparse = row["dense"], row.get("sparse", {})
        for j, name in enumerate(names):
            if name.startswith("bigram_"):
                X[i, j] = sparse.get(name[len("bigram_"):], 0)
            else:
                X[i, j] = dense[name]
    return X


def _labels(rows: list[dict]) -> np.ndarray:
    return np.array([1.0 if r["label"] == corpus.POSITIVE else 0.0
                     for r in rows])


@cli.command()
@click.argument("rows_path", type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--vocab", "vocab_path", type=click.Path(exists=True),
              default=None,
              help="Include this vocabulary's bigram columns.")
@click.option("--learning-rate", type=float, default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--l2", "l2_lambda", type=float, default=None)
def train(rows_path: str, out_path: str, vocab_path: str | None,
          learning_rate: float | None, epochs: int | None,
          l2_lambda: float | None) -> None:
    """Fit the logistic classifier on feature rows."""
    rows = features.parse_feature_rows(
        Path(rows_path).read_text(encoding="utf-8"))
    if not rows:
        raise click.ClickException(f"{rows_path} holds no rows")
    vocab_size = 0
    if vocab_path:
        vocab_size = len(features.load_vocabulary(vocab_path))
    names = _feature_names(rows, vocab_size)
    hp = {k: v for k, v in (("learning_rate", learning_rate),
                            ("epochs", epochs),
                            ("l2_lambda", l2_lambda)) if v is not None}
    fitted = model_mod.train(_matrix(rows, names), _labels(rows),
                             hyperparams=hp or None, feature_names=names,
                             vocab_ref=vocab_path)
    model_mod.save_model(fitted, out_path)
    click.echo(f"trained on {len(rows)} rows "
               f"({len(names)} features) -> {out_path}")


@cli.command("eval")
@click.argument("model_path", type=click.Path(exists=True))
@click.argument("rows_path", type=click.Path(exists=True))
@click.option("--threshold", type=float, default=model_mod.DEFAULT_THRESHOLD,
              show_default=True)
def eval_cmd(model_path: str, rows_path: str, threshold: float) -> None:
    """Score a trained model against labeled feature rows."""
    fitted = model_mod.load_model(model_path)
    rows = features.parse_feature_rows(
        Path(rows_path).read_text(encoding="utf-8"))
    if not rows:
        raise click.ClickException(f"{rows_path} holds no rows")
    X = _matrix(rows, fitted.feature_names)
    preds = model_mod.predict(fitted, X, threshold=threshold)
    gold = [int(v) for v in _labels(rows)]
    report = model_mod.evaluate(preds, gold, threshold=threshold)
    click.echo(f"n: {len(rows)}")
    click.echo(f"precision: {report.precision:.4f}")
    click.echo(f"recall:    {report.recall:.4f}")
    click.echo(f"f1:        {report.f1:.4f}")
    click.echo(f"tp/fp/fn/tn: {report.tp}/{report.fp}/{report.fn}/{report.tn}")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--transcript-dir", type=click.Path(), default=None,
              help="Persist finished games as transcript JSONL here.")
def serve(host: str, port: int, transcript_dir: str | None) -> None:
    """Run the live-game session server (HTTP + WebSocket)."""
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(transcript_dir=transcript_dir),
                host=host, port=port, log_level="info")


main = cli

if __name__ == "__main__":
    main()
