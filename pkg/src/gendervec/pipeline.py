"""End-to-end orchestration: single runs, the context grid, manifests.

A run is fully determined by (corpus, lexicon, context config, embedding
config, training config, frequency filters, split seed, stats seed), and
the RunManifest captures exactly that plus input digests, so a run can
be replayed byte for byte.  The context grid trains one model per
(context type, window size) cell on a word partition fixed before the
grid starts; the held-out test list is digest-pinned so the final
evaluation can prove it never leaked into tuning.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classifier import (
    MLPModel,
    PredictionRecord,
    TrainConfig,
    dev_accuracy,
    predict_records,
    save_model,
    save_prediction_records,
    train,
)
from .cooccurrence import CONTEXT_TYPES, ContextConfig
from .corpus import Vocabulary, build_vocabulary, filter_by_frequency, read_sentences
from .dataset import (
    CLASSES,
    DEFAULT_RATIOS,
    DecileReport,
    LabeledExample,
    SplitBundle,
    build_dataset,
    bundle_from_manifest,
    class_ratio_by_decile,
    save_split_manifest,
    split_words_by_class,
    stratified_split,
    word_list_digest,
)
from .embedding import EmbeddingConfig, EmbeddingMatrix, embed, truncated_svd
from .errors import ConfigurationError, DataError, GendervecError
from .lexicon import CODE_TO_CLASS, GenderLexicon, parse_lexicon
from .metrics import (
    EntropyFrequencyReport,
    EvalReport,
    build_eval_report,
    entropy_frequency_analysis,
)

THREADS_ENV = "GENDERVEC_THREADS"

# Tie-break order across context types when dev accuracies are equal.
_TYPE_RANK = {"asymmetric_backward": 0, "symmetric": 1, "asymmetric_forward": 2}


def resolve_workers(workers: int | None = None) -> int:
    """Worker count for grid cells; the env var caps explicit requests."""
    env = os.environ.get(THREADS_ENV)
    cap = None
    if env is not None:
        try:
            cap = int(env)
        except ValueError:
            raise ConfigurationError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        if cap < 1:
            raise ConfigurationError(f"{THREADS_ENV} must be >= 1, got {cap}")
    if workers is None:
        workers = cap if cap is not None else 1
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")
    if cap is not None:
        workers = min(workers, cap)
    return workers


def prepare_inputs(
    corpus_path, lexicon_path, vocab_min_freq: int = 0
) -> tuple[Vocabulary, GenderLexicon]:
    """Vocabulary from the corpus, core-gender lexicon from the TSV."""
    vocab = build_vocabulary(read_sentences(corpus_path))
    vocab = filter_by_frequency(vocab, vocab_min_freq)
    if len(vocab) == 0:
        raise DataError(f"{corpus_path}: no vocabulary entries survive the frequency filter")
    lexicon = parse_lexicon(lexicon_path).restrict_to_core_genders()
    if len(lexicon) == 0:
        raise DataError(f"{lexicon_path}: no u/n entries in lexicon")
    return vocab, lexicon


def labeled_words_by_class(
    vocab: Vocabulary, lexicon: GenderLexicon, min_freq: int = 0
) -> dict[str, list[str]]:
    """The exact word set build_dataset would label, grouped by class.

    Used to pin the split before any embedding exists; selection and
    order (vocabulary ids) match build_dataset, so splits agree.
    """
    words_by_class: dict[str, list[str]] = {}
    for word, _, freq in vocab.entries():
        if freq <= min_freq or word not in lexicon:
            continue
        cls = CODE_TO_CLASS[lexicon.code_of(word)]
        words_by_class.setdefault(cls, []).append(word)
    return words_by_class


def project_2d(vectors: np.ndarray, seed: int = 0) -> np.ndarray:
    """Rank-2 view of mean-centered vectors via truncated SVD.

    Projection onto orthonormal directions never expands pairwise
    distances.  Vectors whose centered rank is below 2 (e.g. all
    identical) cannot be projected and raise.
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 2:
        raise DataError(f"need at least 2 vectors of dim >= 2, got shape {x.shape}")
    centered = x - x.mean(axis=0)
    sigma, v = truncated_svd(centered, 2, seed=seed)
    if sigma[0] <= 0.0 or sigma[1] <= sigma[0] * 1e-12:
        raise DataError("vectors have rank < 2 after centering; nothing to project")
    return centered @ v


@dataclass(frozen=True, eq=False)
class FinalEvaluation:
    records: tuple[PredictionRecord, ...]
    report: EvalReport
    analysis: EntropyFrequencyReport
    errors: tuple[PredictionRecord, ...]
    projection: np.ndarray | None
    test_digest: str


def final_evaluate(
    model: MLPModel,
    test_set: Sequence[LabeledExample],
    expected_test_digest: str | None = None,
    n_perm: int = 10_000,
    stats_seed: int = 0,
) -> FinalEvaluation:
    """Evaluate the chosen model exactly once on the held-out words.

    If a digest pinned before tuning is supplied, the test word list
    must hash to it; a mismatch means the held-out set was tampered
    with and aborts.
    """
    digest = word_list_digest(ex.word for ex in test_set)
    if expected_test_digest is not None and digest != expected_test_digest:
        raise DataError(
            f"test-set digest mismatch: expected {expected_test_digest}, got {digest}"
        )
    records = predict_records(model, test_set)
    report = build_eval_report(records)
    analysis = entropy_frequency_analysis(records, n_perm=n_perm, seed=stats_seed)
    try:
        projection = project_2d(np.stack([ex.vector for ex in test_set]))
    except DataError:
        projection = None
    errors = tuple(
        sorted((r for r in records if not r.correct), key=lambda r: (-r.entropy, r.word))
    )
    return FinalEvaluation(
        records=tuple(records),
        report=report,
        analysis=analysis,
        errors=errors,
        projection=projection,
        test_digest=digest,
    )


@dataclass(frozen=True)
class CellResult:
    context: ContextConfig
    dev_accuracy: float | None
    per_class_dev_accuracy: dict | None
    error: str | None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True, eq=False)
class GridResult:
    cells: tuple[CellResult, ...]
    best: ContextConfig
    split_seed: int
    test_digest: str
    # The word partition pinned before any cell ran, in split-manifest shape.
    split_manifest: dict

    def cell(self, context_type: str, window_size: int) -> CellResult:
        for c in self.cells:
            if (c.context.context_type, c.context.window_size) == (context_type, window_size):
                return c
        raise KeyError(f"no grid cell for ({context_type}, {window_size})")

    def to_dict(self) -> dict:
        return {
            "split_seed": self.split_seed,
            "test_digest": self.test_digest,
            "best": self.best.to_dict(),
            "cells": [
                {
                    "context": c.context.to_dict(),
                    "dev_accuracy": c.dev_accuracy,
                    "per_class_dev_accuracy": c.per_class_dev_accuracy,
                    "error": c.error,
                }
                for c in self.cells
            ],
        }


def default_grid(
    context_types: Sequence[str] = CONTEXT_TYPES,
    window_sizes: Sequence[int] = (1, 2, 3, 4, 5),
) -> list[ContextConfig]:
    """The full tuning grid: every context type crossed with every window."""
    return [
        ContextConfig(context_type=t, window_size=w)
        for t in context_types
        for w in window_sizes
    ]


def _grid_key(config: ContextConfig) -> tuple[int, int]:
    return (config.window_size, _TYPE_RANK[config.context_type])


def grid_search(
    corpus_path,
    lexicon_path,
    grid: Sequence[ContextConfig] | None = None,
    embedding_config: EmbeddingConfig = EmbeddingConfig(),
    train_config: TrainConfig = TrainConfig(),
    *,
    min_freq: int = 0,
    vocab_min_freq: int = 0,
    split_seed: int = 0,
    ratios: Sequence[float] = DEFAULT_RATIOS,
    workers: int | None = None,
) -> GridResult:
    """Train one model per grid cell and pick the best dev accuracy.

    The labeled word partition is computed once, before any cell runs,
    from the vocabulary and lexicon alone, so every cell trains and
    validates on identical word lists and the test digest is pinned up
    front.  A failing cell is recorded and skipped, not fatal.  Ties on
    dev accuracy go to the smaller window, then backward before
    symmetric before forward.
    """
    cells = sorted(grid if grid is not None else default_grid(), key=_grid_key)
    if not cells:
        raise ConfigurationError("empty tuning grid")
    if len({(c.context_type, c.window_size) for c in cells}) != len(cells):
        raise ConfigurationError("duplicate grid cells")
    vocab, lexicon = prepare_inputs(corpus_path, lexicon_path, vocab_min_freq)
    words_by_class = labeled_words_by_class(vocab, lexicon, min_freq)
    partitions = split_words_by_class(words_by_class, ratios, split_seed)
    manifest = {
        "seed": split_seed,
        "ratios": list(ratios),
        "partitions": partitions,
    }
    test_digest = word_list_digest(partitions["test"])

    def run_cell(context: ContextConfig) -> CellResult:
        try:
            emb = embed(read_sentences(corpus_path), vocab, context, embedding_config)
            data = build_dataset(emb, lexicon, vocab, min_freq)
            bundle = bundle_from_manifest(manifest, data)
            model = train(bundle.train, bundle.dev, train_config)
            acc = dev_accuracy(model, bundle.dev)
            per_class = _per_class_accuracy(model, bundle.dev)
            return CellResult(context, acc, per_class, None)
        except GendervecError as exc:
            return CellResult(context, None, None, f"{type(exc).__name__}: {exc}")

    n_workers = resolve_workers(workers)
    if n_workers == 1:
        results = [run_cell(c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(run_cell, cells))

    survivors = [c for c in results if c.ok]
    if not survivors:
        raise DataError(
            "every grid cell failed; first error: " + (results[0].error or "unknown")
        )
    best = min(survivors, key=lambda c: (-c.dev_accuracy, _grid_key(c.context)))
    return GridResult(
        cells=tuple(results),
        best=best.context,
        split_seed=split_seed,
        test_digest=test_digest,
        split_manifest={**manifest, "test_digest": test_digest},
    )


def _per_class_accuracy(model: MLPModel, examples: Sequence[LabeledExample]) -> dict:
    records = predict_records(model, examples)
    out = {}
    for cls in CLASSES:
        members = [r for r in records if r.gold == cls]
        out[cls] = (
            sum(1 for r in members if r.correct) / len(members) if members else None
        )
    return out


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    vocab: Vocabulary
    lexicon: GenderLexicon
    embedding: EmbeddingMatrix
    dataset: tuple[LabeledExample, ...]
    bundle: SplitBundle
    model: MLPModel
    evaluation: FinalEvaluation
    decile_report: DecileReport | None


def run_experiment(
    corpus_path,
    lexicon_path,
    context: ContextConfig,
    embedding_config: EmbeddingConfig = EmbeddingConfig(),
    train_config: TrainConfig = TrainConfig(),
    *,
    min_freq: int = 0,
    vocab_min_freq: int = 0,
    split_seed: int = 0,
    ratios: Sequence[float] = DEFAULT_RATIOS,
    n_perm: int = 10_000,
    stats_seed: int = 0,
) -> ExperimentResult:
    """One full pass: ingest, embed, label, split, train, evaluate."""
    vocab, lexicon = prepare_inputs(corpus_path, lexicon_path, vocab_min_freq)
    embedding = embed(read_sentences(corpus_path), vocab, context, embedding_config)
    data = build_dataset(embedding, lexicon, vocab, min_freq)
    bundle = stratified_split(data, ratios, split_seed)
    model = train(bundle.train, bundle.dev, train_config)
    evaluation = final_evaluate(
        model, bundle.test, n_perm=n_perm, stats_seed=stats_seed
    )
    decile = class_ratio_by_decile(data) if len(data) >= 10 else None
    return ExperimentResult(
        vocab=vocab,
        lexicon=lexicon,
        embedding=embedding,
        dataset=tuple(data),
        bundle=bundle,
        model=model,
        evaluation=evaluation,
        decile_report=decile,
    )


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to replay a run byte for byte."""

    corpus_path: str
    corpus_sha256: str
    lexicon_path: str
    lexicon_sha256: str
    context: ContextConfig
    embedding: EmbeddingConfig
    training: TrainConfig
    min_freq: int = 0
    vocab_min_freq: int = 0
    split_seed: int = 0
    ratios: tuple[float, float, float] = DEFAULT_RATIOS
    n_perm: int = 10_000
    stats_seed: int = 0

    def to_dict(self) -> dict:
        return {
            "corpus_path": str(self.corpus_path),
            "corpus_sha256": self.corpus_sha256,
            "lexicon_path": str(self.lexicon_path),
            "lexicon_sha256": self.lexicon_sha256,
            "context": self.context.to_dict(),
            "embedding": self.embedding.to_dict(),
            "training": self.training.to_dict(),
            "min_freq": self.min_freq,
            "vocab_min_freq": self.vocab_min_freq,
            "split_seed": self.split_seed,
            "ratios": list(self.ratios),
            "n_perm": self.n_perm,
            "stats_seed": self.stats_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        return cls(
            corpus_path=data["corpus_path"],
            corpus_sha256=data["corpus_sha256"],
            lexicon_path=data["lexicon_path"],
            lexicon_sha256=data["lexicon_sha256"],
            context=ContextConfig.from_dict(data["context"]),
            embedding=EmbeddingConfig.from_dict(data["embedding"]),
            training=TrainConfig.from_dict(data["training"]),
            min_freq=int(data.get("min_freq", 0)),
            vocab_min_freq=int(data.get("vocab_min_freq", 0)),
            split_seed=int(data.get("split_seed", 0)),
            ratios=tuple(data.get("ratios", DEFAULT_RATIOS)),
            n_perm=int(data.get("n_perm", 10_000)),
            stats_seed=int(data.get("stats_seed", 0)),
        )


def build_manifest(
    corpus_path,
    lexicon_path,
    context: ContextConfig,
    embedding_config: EmbeddingConfig = EmbeddingConfig(),
    train_config: TrainConfig = TrainConfig(),
    **kwargs,
) -> RunManifest:
    """Manifest for the given inputs, hashing both files now."""
    return RunManifest(
        corpus_path=str(corpus_path),
        corpus_sha256=file_sha256(corpus_path),
        lexicon_path=str(lexicon_path),
        lexicon_sha256=file_sha256(lexicon_path),
        context=context,
        embedding=embedding_config,
        training=train_config,
        **kwargs,
    )


def save_manifest(manifest: RunManifest, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n")


def load_manifest(path) -> RunManifest:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError:
            raise DataError(f"{path}: malformed manifest JSON") from None
    return RunManifest.from_dict(data)


def run_from_manifest(manifest: RunManifest, out_dir, check_digests: bool = True) -> dict:
    """Replay a manifest and write the core artifacts into ``out_dir``.

    Returns a name -> path map.  Identical manifests write identical
    bytes for the eval report and split manifest.
    """
    if check_digests:
        for label, path, expected in (
            ("corpus", manifest.corpus_path, manifest.corpus_sha256),
            ("lexicon", manifest.lexicon_path, manifest.lexicon_sha256),
        ):
            actual = file_sha256(path)
            if actual != expected:
                raise DataError(
                    f"{label} digest mismatch for {path}: manifest has {expected}, file has {actual}"
                )
    result = run_experiment(
        manifest.corpus_path,
        manifest.lexicon_path,
        manifest.context,
        manifest.embedding,
        manifest.training,
        min_freq=manifest.min_freq,
        vocab_min_freq=manifest.vocab_min_freq,
        split_seed=manifest.split_seed,
        ratios=manifest.ratios,
        n_perm=manifest.n_perm,
        stats_seed=manifest.stats_seed,
    )
    os.makedirs(out_dir, exist_ok=True)
    paths = {name: os.path.join(out_dir, name) for name in (
        "manifest.json", "eval_report.json", "split_manifest.json",
        "records.csv", "stats.json", "model.bin",
    )}
    save_manifest(manifest, paths["manifest.json"])
    with open(paths["eval_report.json"], "w", encoding="utf-8") as fh:
        fh.write(result.evaluation.report.to_json())
    save_split_manifest(result.bundle, paths["split_manifest.json"])
    save_prediction_records(result.evaluation.records, paths["records.csv"])
    with open(paths["stats.json"], "w", encoding="utf-8") as fh:
        fh.write(json.dumps(result.evaluation.analysis.to_dict(), indent=2, sort_keys=True) + "\n")
    save_model(result.model, paths["model.bin"])
    return paths
