"""Command-line front end.

Subcommands mirror the pipeline stages: ingest, cooc, embed, label,
split, train, tune, eval, report, synth.  Every numeric option can come
from a JSON config file (--config) using the exact field names of the
underlying configs; explicit flags override the file.  Exit codes: 0 on
success, 2 for configuration problems, 3 for data problems, 4 for
numerical failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import classifier, cooccurrence, corpus, dataset, embedding, lexicon, metrics
from . import pipeline, report, synthetic
from .errors import ConfigurationError, DataError, GendervecError

logger = logging.getLogger(__name__)

CONFIG_KEYS = {
    # context
    "context_type", "window_size", "distance_weighting", "allow_large_window",
    # embedding
    "K", "alpha", "sigma_power", "seed",
    # training
    "learning_rate", "momentum", "batch_size", "max_epochs", "patience",
    "hidden_size",
    # pipeline
    "min_freq", "vocab_min_freq", "split_seed", "ratios", "n_perm", "stats_seed",
}


def _load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: malformed JSON config: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: config must be a JSON object")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ConfigurationError(f"{path}: unknown config keys {sorted(unknown)}")
    return data


class Options:
    """Flag-over-config-over-default resolution."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = _load_config(args.config) if getattr(args, "config", None) else {}

    def get(self, name: str, default=None, cast=None):
        value = getattr(self.args, name, None)
        if value is None:
            value = self.config.get(name, default)
        if value is not None and cast is not None:
            value = cast(value)
        return value

    def require(self, name: str):
        value = self.get(name)
        if value is None:
            raise ConfigurationError(f"missing required option --{name.replace('_', '-')}")
        return value

    def context_config(self) -> cooccurrence.ContextConfig:
        return cooccurrence.ContextConfig(
            context_type=self.require("context_type"),
            window_size=int(self.require("window_size")),
            distance_weighting=bool(self.get("distance_weighting", False)),
            allow_large_window=bool(self.get("allow_large_window", False)),
        )

    def embedding_config(self) -> embedding.EmbeddingConfig:
        return embedding.EmbeddingConfig(
            k=int(self.get("K", 50)),
            alpha=float(self.get("alpha", 0.5)),
            sigma_power=float(self.get("sigma_power", 0.0)),
            seed=int(self.get("seed", 0)),
        )

    def train_config(self) -> classifier.TrainConfig:
        defaults = classifier.TrainConfig()
        return classifier.TrainConfig(
            learning_rate=float(self.get("learning_rate", defaults.learning_rate)),
            momentum=float(self.get("momentum", defaults.momentum)),
            batch_size=int(self.get("batch_size", defaults.batch_size)),
            max_epochs=int(self.get("max_epochs", defaults.max_epochs)),
            patience=int(self.get("patience", defaults.patience)),
            hidden_size=int(self.get("hidden_size", defaults.hidden_size)),
            seed=int(self.get("seed", defaults.seed)),
        )

    def ratios(self) -> tuple[float, float, float]:
        value = self.get("ratios", dataset.DEFAULT_RATIOS)
        if isinstance(value, str):
            try:
                value = tuple(float(x) for x in value.split(","))
            except ValueError:
                raise ConfigurationError(f"malformed ratios {value!r}") from None
        return tuple(value)


def _load_embedding(path) -> embedding.EmbeddingMatrix:
    with open(path, "rb") as fh:
        magic = fh.read(len(embedding.EMBEDDING_MAGIC))
    if magic == embedding.EMBEDDING_MAGIC:
        return embedding.load_embedding_binary(path)
    return embedding.load_embedding_text(path)


def _examples_from_files(embedding_path, dataset_path) -> list[dataset.LabeledExample]:
    emb = _load_embedding(embedding_path)
    rows = dataset.load_dataset_table(dataset_path)
    return dataset.join_with_embedding(rows, emb)


def cmd_ingest(args) -> int:
    opts = Options(args)
    vocab = corpus.build_vocabulary(corpus.read_sentences(args.corpus))
    vocab = corpus.filter_by_frequency(vocab, int(opts.get("vocab_min_freq", 0)))
    if len(vocab) == 0:
        raise DataError(f"{args.corpus}: no vocabulary entries survive the frequency filter")
    corpus.save_vocabulary(vocab, args.out)
    logger.info("wrote %d vocabulary entries to %s", len(vocab), args.out)
    return 0


def cmd_cooc(args) -> int:
    opts = Options(args)
    vocab = corpus.load_vocabulary(args.vocab)
    config = opts.context_config()
    cooc = cooccurrence.count_cooccurrences(
        corpus.read_sentences(args.corpus), vocab, config
    )
    cooccurrence.save_cooccurrence(cooc, args.out)
    logger.info("wrote %d nonzero counts to %s", cooc.nnz, args.out)
    return 0


def cmd_embed(args) -> int:
    opts = Options(args)
    emb_config = opts.embedding_config()
    if args.cooc:
        cooc = cooccurrence.load_cooccurrence(args.cooc)
        vocab = corpus.load_vocabulary(args.vocab)
        emb = embedding.embed_counts(cooc, vocab, emb_config)
    else:
        if not args.corpus:
            raise ConfigurationError("embed needs either --cooc or --corpus")
        vocab = corpus.load_vocabulary(args.vocab)
        context = opts.context_config()
        emb = embedding.embed(
            corpus.read_sentences(args.corpus), vocab, context, emb_config
        )
    if args.binary:
        embedding.save_embedding_binary(emb, args.out)
    else:
        embedding.save_embedding_text(emb, args.out)
    logger.info("wrote %d vectors of dim %d to %s", len(emb), emb.k, args.out)
    return 0


def cmd_label(args) -> int:
    opts = Options(args)
    emb = _load_embedding(args.embedding)
    vocab = corpus.load_vocabulary(args.vocab)
    lex = lexicon.parse_lexicon(args.lexicon).restrict_to_core_genders()
    data = dataset.build_dataset(emb, lex, vocab, int(opts.get("min_freq", 0)))
    dataset.save_dataset_table(data, args.out)
    logger.info("wrote %d labeled words to %s", len(data), args.out)
    if args.summary:
        lexicon.save_code_summary(lex, args.summary)
    if args.deciles:
        decile = dataset.class_ratio_by_decile(data)
        with open(args.deciles, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "group_sizes": list(decile.group_sizes),
                    "uter_shares": list(decile.uter_shares),
                    "mean_uter_share": decile.mean_uter_share,
                    "std_uter_share": decile.std_uter_share,
                },
                fh, indent=2, sort_keys=True,
            )
            fh.write("\n")
    return 0


def cmd_split(args) -> int:
    opts = Options(args)
    rows = dataset.load_dataset_table(args.dataset)
    words_by_class: dict[str, list[str]] = {}
    for word, gender, _ in rows:
        words_by_class.setdefault(gender, []).append(word)
    ratios = opts.ratios()
    seed = int(opts.get("split_seed", 0))
    parts = dataset.split_words_by_class(words_by_class, ratios, seed)
    manifest = {
        "seed": seed,
        "ratios": list(ratios),
        "partitions": parts,
        "test_digest": dataset.word_list_digest(parts["test"]),
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dataset.manifest_to_json(manifest))
    sizes = {name: len(words) for name, words in parts.items()}
    logger.info("wrote split %s to %s", sizes, args.out)
    return 0


def cmd_train(args) -> int:
    opts = Options(args)
    examples = _examples_from_files(args.embedding, args.dataset)
    manifest = dataset.load_split_manifest(args.split)
    bundle = dataset.bundle_from_manifest(manifest, examples)
    model = classifier.train(bundle.train, bundle.dev, opts.train_config())
    classifier.save_model(model, args.out)
    acc = classifier.dev_accuracy(model, bundle.dev)
    logger.info("trained model (dev accuracy %.4f), wrote %s", acc, args.out)
    return 0


def cmd_tune(args) -> int:
    opts = Options(args)
    types = args.context_types.split(",") if args.context_types else cooccurrence.CONTEXT_TYPES
    if args.window_sizes:
        try:
            windows = [int(w) for w in args.window_sizes.split(",")]
        except ValueError:
            raise ConfigurationError(f"malformed --window-sizes {args.window_sizes!r}") from None
    else:
        windows = [1, 2, 3, 4, 5]
    grid = pipeline.default_grid(types, windows)
    result = pipeline.grid_search(
        args.corpus,
        args.lexicon,
        grid,
        opts.embedding_config(),
        opts.train_config(),
        min_freq=int(opts.get("min_freq", 0)),
        vocab_min_freq=int(opts.get("vocab_min_freq", 0)),
        split_seed=int(opts.get("split_seed", 0)),
        ratios=opts.ratios(),
        workers=args.workers,
    )
    os.makedirs(args.out, exist_ok=True)
    grid_path = os.path.join(args.out, "grid.json")
    with open(grid_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n")
    split_path = os.path.join(args.out, "split_manifest.json")
    with open(split_path, "w", encoding="utf-8") as fh:
        fh.write(dataset.manifest_to_json(result.split_manifest))
    for cell in result.cells:
        label = f"{cell.context.context_type} w={cell.context.window_size}"
        if cell.ok:
            logger.info("cell %-28s dev accuracy %.4f", label, cell.dev_accuracy)
        else:
            logger.warning("cell %-28s failed: %s", label, cell.error)
    logger.info(
        "best config: %s w=%d; wrote %s",
        result.best.context_type, result.best.window_size, grid_path,
    )
    return 0


def cmd_eval(args) -> int:
    opts = Options(args)
    examples = _examples_from_files(args.embedding, args.dataset)
    manifest = dataset.load_split_manifest(args.split)
    bundle = dataset.bundle_from_manifest(manifest, examples)
    model = classifier.load_model(args.model)
    expected = args.expected_test_digest or manifest.get("test_digest")
    evaluation = pipeline.final_evaluate(
        model,
        bundle.test,
        expected_test_digest=expected,
        n_perm=int(opts.get("n_perm", 10_000)),
        stats_seed=int(opts.get("stats_seed", 0)),
    )
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "eval_report.json"), "w", encoding="utf-8") as fh:
        fh.write(evaluation.report.to_json())
    classifier.save_prediction_records(
        evaluation.records, os.path.join(args.out, "records.csv")
    )
    with open(os.path.join(args.out, "stats.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(evaluation.analysis.to_dict(), indent=2, sort_keys=True) + "\n")
    logger.info(
        "test accuracy %.4f (baseline %.4f) over %d words; wrote %s",
        evaluation.report.accuracy,
        evaluation.report.baseline_accuracy,
        evaluation.report.n,
        args.out,
    )
    return 0


def cmd_report(args) -> int:
    opts = Options(args)
    records = classifier.load_prediction_records(os.path.join(args.eval_dir, "records.csv"))
    eval_report = metrics.build_eval_report(records)
    analysis = metrics.entropy_frequency_analysis(
        records,
        n_perm=int(opts.get("n_perm", 10_000)),
        seed=int(opts.get("stats_seed", 0)),
    )
    projection = None
    if args.embedding:
        emb = _load_embedding(args.embedding)
        vectors = np.stack([emb.vector(r.word) for r in records])
        projection = pipeline.project_2d(vectors)
    decile_report = None
    if args.dataset:
        rows = dataset.load_dataset_table(args.dataset)
        if args.embedding is None:
            raise ConfigurationError("--dataset needs --embedding for vectors")
        examples = dataset.join_with_embedding(rows, emb)
        decile_report = dataset.class_ratio_by_decile(examples)
    grid_dict = None
    if args.grid:
        with open(args.grid, "r", encoding="utf-8") as fh:
            grid_dict = json.load(fh)
    paths = report.emit_report(
        args.out, records, eval_report, analysis,
        projection=projection, decile_report=decile_report, grid_dict=grid_dict,
    )
    logger.info("wrote %d report files to %s", len(paths), args.out)
    return 0


def cmd_synth(args) -> int:
    spec = synthetic.SyntheticSpec(
        noun_count=args.nouns,
        filler_count=args.fillers,
        sentence_count=args.sentences,
        seed=args.seed,
        agreement_noise=args.agreement_noise,
        ambiguous_fraction=args.ambiguous_fraction,
        ambiguous_flip=args.ambiguous_flip,
        zipf_exponent=args.zipf_exponent,
    )
    language = synthetic.generate_synthetic_language(spec)
    synthetic.write_corpus(language, args.out_corpus)
    lexicon.save_lexicon(language.lexicon, args.out_lexicon)
    counts = language.lexicon.counts_by_code()
    logger.info(
        "wrote %d sentences to %s; lexicon %s with u=%d n=%d",
        len(language.sentences), args.out_corpus, args.out_lexicon,
        counts["u"], counts["n"],
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gendervec",
        description="Count-based word embeddings and a gender classifier probe.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument("--config", help="JSON config file; flags override its fields")

    def add_context(p):
        p.add_argument("--context-type", dest="context_type",
                       choices=cooccurrence.CONTEXT_TYPES)
        p.add_argument("--window-size", dest="window_size", type=int)
        p.add_argument("--distance-weighting", dest="distance_weighting",
                       action="store_const", const=True)
        p.add_argument("--allow-large-window", dest="allow_large_window",
                       action="store_const", const=True)

    def add_embedding_opts(p):
        p.add_argument("--dim", dest="K", type=int, help="embedding dimensionality K")
        p.add_argument("--alpha", dest="alpha", type=float)
        p.add_argument("--sigma-power", dest="sigma_power", type=float)
        p.add_argument("--seed", dest="seed", type=int)

    def add_train_opts(p):
        p.add_argument("--learning-rate", dest="learning_rate", type=float)
        p.add_argument("--momentum", dest="momentum", type=float)
        p.add_argument("--batch-size", dest="batch_size", type=int)
        p.add_argument("--max-epochs", dest="max_epochs", type=int)
        p.add_argument("--patience", dest="patience", type=int)
        p.add_argument("--hidden-size", dest="hidden_size", type=int)

    p = sub.add_parser("ingest", help="build a vocabulary TSV from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--vocab-min-freq", dest="vocab_min_freq", type=int)
    add_config(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("cooc", help="count windowed co-occurrences")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--out", required=True)
    add_context(p)
    add_config(p)
    p.set_defaults(func=cmd_cooc)

    p = sub.add_parser("embed", help="factor counts into word vectors")
    p.add_argument("--corpus")
    p.add_argument("--cooc")
    p.add_argument("--vocab", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--binary", action="store_true")
    add_context(p)
    add_embedding_opts(p)
    add_config(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("label", help="join embedding, lexicon and vocabulary")
    p.add_argument("--embedding", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--min-freq", dest="min_freq", type=int)
    p.add_argument("--summary", help="write lexicon code counts as JSON")
    p.add_argument("--deciles", help="write the class-per-decile diagnostic as JSON")
    add_config(p)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("split", help="stratified train/dev/test split")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--split-seed", dest="split_seed", type=int)
    p.add_argument("--ratios", dest="ratios")
    add_config(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train the gender classifier")
    p.add_argument("--embedding", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--out", required=True)
    add_train_opts(p)
    p.add_argument("--seed", dest="seed", type=int)
    add_config(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tune", help="grid search over context configurations")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--context-types", help="comma-separated subset of context types")
    p.add_argument("--window-sizes", help="comma-separated subset of window sizes")
    p.add_argument("--min-freq", dest="min_freq", type=int)
    p.add_argument("--vocab-min-freq", dest="vocab_min_freq", type=int)
    p.add_argument("--split-seed", dest="split_seed", type=int)
    p.add_argument("--ratios", dest="ratios")
    p.add_argument("--workers", type=int, help=f"parallel cells; capped by ${pipeline.THREADS_ENV}")
    add_embedding_opts(p)
    add_train_opts(p)
    add_config(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("eval", help="final evaluation on the held-out test set")
    p.add_argument("--embedding", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--expected-test-digest", dest="expected_test_digest")
    p.add_argument("--n-perm", dest="n_perm", type=int)
    p.add_argument("--stats-seed", dest="stats_seed", type=int)
    add_config(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="emit SVG/CSV report files from an eval directory")
    p.add_argument("--eval-dir", dest="eval_dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--embedding", help="needed for the 2-D projection plot")
    p.add_argument("--dataset", help="needed for the decile diagnostic")
    p.add_argument("--grid", help="grid.json from tune, for the accuracy-by-window plot")
    p.add_argument("--n-perm", dest="n_perm", type=int)
    p.add_argument("--stats-seed", dest="stats_seed", type=int)
    add_config(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", help="generate a synthetic agreement language")
    p.add_argument("--out-corpus", dest="out_corpus", required=True)
    p.add_argument("--out-lexicon", dest="out_lexicon", required=True)
    p.add_argument("--nouns", type=int, default=1000)
    p.add_argument("--fillers", type=int, default=40)
    p.add_argument("--sentences", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--agreement-noise", dest="agreement_noise", type=float, default=0.0)
    p.add_argument("--ambiguous-fraction", dest="ambiguous_fraction", type=float, default=0.0)
    p.add_argument("--ambiguous-flip", dest="ambiguous_flip", type=float, default=0.45)
    p.add_argument("--zipf-exponent", dest="zipf_exponent", type=float, default=1.0)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return args.func(args)
    except GendervecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        # unreadable/missing input and unwritable output files count as
        # data errors for exit-code purposes
        print(f"error: {exc}", file=sys.stderr)
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
