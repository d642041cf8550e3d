"""Evaluation metrics and nonparametric statistics.

Everything here is a pure function of prediction records or plain
arrays: confusion counts, accuracy, per-class precision/recall/F,
prior-weighted accuracy, the majority-class baseline, Kendall tau-b
with a tie-adjusted normal approximation, a Fisher-Pitman two-sample
permutation test, and the entropy/frequency analysis that combines
them.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .classifier import PredictionRecord
from .dataset import CLASSES
from .errors import ConfigurationError, DataError

logger = logging.getLogger(__name__)

# Fisher-Pitman: enumerate every relabeling when the assignment count
# stays at or below this, otherwise sample.
EXHAUSTIVE_LIMIT = 100_000


class ConfusionMatrix:
    """Gold-by-predicted counts over the two gender classes."""

    def __init__(self, counts: Mapping[tuple[str, str], int]):
        self._counts = {(g, p): 0 for g in CLASSES for p in CLASSES}
        for (gold, predicted), value in counts.items():
            if gold not in CLASSES or predicted not in CLASSES:
                raise DataError(f"unknown class pair ({gold!r}, {predicted!r})")
            if value < 0:
                raise DataError(f"negative count for ({gold!r}, {predicted!r})")
            self._counts[(gold, predicted)] = int(value)

    @classmethod
    def from_records(cls, records: Iterable[PredictionRecord]) -> "ConfusionMatrix":
        counts: Counter = Counter()
        for r in records:
            counts[(r.gold, r.predicted)] += 1
        return cls(counts)

    def count(self, gold: str, predicted: str) -> int:
        return self._counts[(gold, predicted)]

    @property
    def total(self) -> int:
        return sum(self._counts.values())

    @property
    def correct(self) -> int:
        return sum(self._counts[(c, c)] for c in CLASSES)

    def support(self, cls: str) -> int:
        return sum(self._counts[(cls, p)] for p in CLASSES)

    def predicted_total(self, cls: str) -> int:
        return sum(self._counts[(g, cls)] for g in CLASSES)

    def to_dict(self) -> dict:
        return {g: {p: self._counts[(g, p)] for p in CLASSES} for g in CLASSES}


def accuracy(confusion: ConfusionMatrix) -> float:
    """Share of agreeing (gold, predicted) pairs."""
    if confusion.total == 0:
        raise DataError("empty confusion matrix")
    return confusion.correct / confusion.total


def precision_recall_f(confusion: ConfusionMatrix, cls: str) -> tuple[float, float, float]:
    """One-vs-rest precision, recall and F-score for ``cls``.

    Degenerate denominators yield 0.0 with a logged warning rather than
    an error, so an all-one-class prediction still produces a report.
    """
    if cls not in CLASSES:
        raise ConfigurationError(f"unknown class {cls!r}")
    tp = confusion.count(cls, cls)
    predicted = confusion.predicted_total(cls)
    support = confusion.support(cls)
    if predicted == 0:
        logger.warning("no predictions for class %r; precision set to 0", cls)
        precision = 0.0
    else:
        precision = tp / predicted
    if support == 0:
        logger.warning("no gold members for class %r; recall set to 0", cls)
        recall = 0.0
    else:
        recall = tp / support
    if precision + recall == 0.0:
        f_score = 0.0
    else:
        f_score = 2.0 * precision * recall / (precision + recall)
    return precision, recall, f_score


def weighted_accuracy(per_class_accuracy: Mapping[str, float], priors: Mapping[str, float]) -> float:
    """Accuracy under externally supplied class priors.

    ``sum(priors[c] * acc[c])``; the priors must cover the same classes
    and sum to 1 within 1e-9.
    """
    if set(priors) != set(per_class_accuracy):
        raise ConfigurationError(
            f"priors cover {sorted(priors)} but accuracies cover {sorted(per_class_accuracy)}"
        )
    total = sum(priors.values())
    if abs(total - 1.0) > 1e-9:
        raise ConfigurationError(f"priors sum to {total!r}, not 1")
    return float(sum(per_class_accuracy[c] * priors[c] for c in priors))


def zero_rule_baseline(labels: Iterable[str]) -> float:
    """Accuracy of always predicting the most common label."""
    counts = Counter(labels)
    total = sum(counts.values())
    if total == 0:
        raise DataError("empty label list")
    return max(counts.values()) / total


@dataclass(frozen=True)
class StatResult:
    """Shared result shape for the correlation and permutation tests."""

    name: str
    statistic: float  # tau for kendall, mean difference for the permutation test
    z: float
    p: float
    n: int
    seed: int | None = None
    method: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "z": self.z,
            "p": self.p,
            "n": self.n,
            "seed": self.seed,
            "method": self.method,
        }


def _tie_terms(values: np.ndarray) -> tuple[int, int, int, int]:
    """(sum t(t-1)/2, sum t(t-1)(2t+5), sum t(t-1), sum t(t-1)(t-2)) over tie groups."""
    pairs = correction = simple = triple = 0
    for t in Counter(values.tolist()).values():
        pairs += t * (t - 1) // 2
        correction += t * (t - 1) * (2 * t + 5)
        simple += t * (t - 1)
        triple += t * (t - 1) * (t - 2)
    return pairs, correction, simple, triple


def kendall_tau_b(x: Sequence[float], y: Sequence[float]) -> StatResult:
    """Kendall's tau-b with tie corrections and a normal-approximation p.

    ``z`` uses the tie-adjusted variance of the concordance count S and
    ``p`` is the two-sided normal tail.  Degenerate input (everything
    tied on either side) has no defined tau and raises.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise DataError(f"x and y must be 1-D and equally long, got {x.shape} and {y.shape}")
    n = x.size
    if n < 2:
        raise DataError(f"need at least 2 observations, got {n}")
    upper = np.triu_indices(n, k=1)
    dx = np.sign(x[:, None] - x[None, :])[upper]
    dy = np.sign(y[:, None] - y[None, :])[upper]
    product = dx * dy
    concordant = int(np.sum(product > 0))
    discordant = int(np.sum(product < 0))
    s = concordant - discordant
    n0 = n * (n - 1) // 2
    n1, vt, t_simple, t_triple = _tie_terms(x)
    n2, vu, u_simple, u_triple = _tie_terms(y)
    if n0 == n1 or n0 == n2:
        raise DataError("tau undefined: all values tied on one side")
    tau = s / math.sqrt((n0 - n1) * (n0 - n2))
    v0 = n * (n - 1) * (2 * n + 5)
    var_s = (v0 - vt - vu) / 18.0
    var_s += (t_simple * u_simple) / (2.0 * n * (n - 1))
    if n > 2:
        var_s += (t_triple * u_triple) / (9.0 * n * (n - 1) * (n - 2))
    z = s / math.sqrt(var_s)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return StatResult(name="kendall_tau_b", statistic=tau, z=z, p=p, n=n,
                      method="normal_approximation")


def fisher_pitman_permutation(
    a: Sequence[float],
    b: Sequence[float],
    n_perm: int = 10_000,
    seed: int = 0,
) -> StatResult:
    """Two-sample permutation test on the difference of group means.

    Enumerates every relabeling when ``C(n, |a|) <= 100000`` (p is then
    the exact share of relabelings with ``|stat| >= |observed|``);
    otherwise draws ``n_perm`` Monte-Carlo relabelings and applies the
    add-one-smoothed two-sided p ``(1 + count) / (1 + n_perm)``.  ``z``
    locates the observed statistic inside the permutation distribution.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size == 0 or b.size == 0:
        raise DataError("both groups must be non-empty")
    if n_perm < 1:
        raise ConfigurationError(f"n_perm must be >= 1, got {n_perm}")
    pooled = np.concatenate([a, b])
    n = pooled.size
    n_a, n_b = a.size, b.size
    total = pooled.sum()

    def stat_from_a_sum(a_sum):
        return a_sum / n_a - (total - a_sum) / n_b

    n_comb = math.comb(n, n_a)
    if n_comb <= EXHAUSTIVE_LIMIT:
        # Enumerate the smaller side; the identity relabeling reproduces
        # the observed statistic through the same arithmetic, so the
        # >= comparison is exact.
        if n_a <= n_b:
            pick, observed_sum = n_a, None
            to_a_sum = lambda s: s
        else:
            pick, observed_sum = n_b, None
            to_a_sum = lambda s: total - s
        sums = np.fromiter(
            (pooled[np.fromiter(idx, dtype=np.int64, count=pick)].sum()
             for idx in itertools.combinations(range(n), pick)),
            dtype=np.float64,
            count=n_comb,
        )
        stats = stat_from_a_sum(to_a_sum(sums))
        side = pooled[:n_a] if n_a <= n_b else pooled[n_a:]
        observed = stat_from_a_sum(to_a_sum(side.sum()))
        count = int(np.sum(np.abs(stats) >= abs(observed)))
        p = count / n_comb
        spread = float(stats.std())
        z = 0.0 if spread == 0.0 else float((observed - stats.mean()) / spread)
        return StatResult(name="fisher_pitman", statistic=float(observed), z=z, p=p,
                          n=n, seed=seed, method=f"exhaustive[{n_comb}]")

    observed = stat_from_a_sum(a.sum())
    rng = np.random.default_rng(seed)
    stats = np.empty(n_perm, dtype=np.float64)
    chunk_rows = max(1, int(5_000_000 / n))
    base = np.arange(n)
    done = 0
    while done < n_perm:
        rows = min(chunk_rows, n_perm - done)
        block = np.tile(base, (rows, 1))
        rng.permuted(block, axis=1, out=block)
        a_sums = pooled[block[:, :n_a]].sum(axis=1)
        stats[done : done + rows] = stat_from_a_sum(a_sums)
        done += rows
    count = int(np.sum(np.abs(stats) >= abs(observed)))
    p = (1 + count) / (1 + n_perm)
    spread = float(stats.std())
    z = 0.0 if spread == 0.0 else float((observed - stats.mean()) / spread)
    return StatResult(name="fisher_pitman", statistic=float(observed), z=z, p=p,
                      n=n, seed=seed, method=f"monte_carlo[{n_perm}]")


@dataclass(frozen=True)
class EntropyFrequencyReport:
    """Entropy/frequency diagnostics over one set of prediction records.

    ``points`` holds ``(entropy, ln_frequency, correct)`` per word.  Any
    statistic whose inputs are degenerate (an empty group, or ties
    everywhere) is None, with the reason recorded in ``warnings``.
    """

    points: tuple[tuple[float, float, bool], ...]
    log_freq_threshold: float
    low_freq_share: float
    mean_entropy_correct: float | None
    mean_entropy_errors: float | None
    tau_overall: StatResult | None
    tau_correct: StatResult | None
    tau_errors: StatResult | None
    tau_correct_low_freq: StatResult | None
    tau_errors_low_freq: StatResult | None
    entropy_permutation: StatResult | None
    warnings: tuple[str, ...]

    def to_dict(self) -> dict:
        def stat(s):
            return None if s is None else s.to_dict()

        return {
            "log_freq_threshold": self.log_freq_threshold,
            "low_freq_share": self.low_freq_share,
            "mean_entropy_correct": self.mean_entropy_correct,
            "mean_entropy_errors": self.mean_entropy_errors,
            "tau_overall": stat(self.tau_overall),
            "tau_correct": stat(self.tau_correct),
            "tau_errors": stat(self.tau_errors),
            "tau_correct_low_freq": stat(self.tau_correct_low_freq),
            "tau_errors_low_freq": stat(self.tau_errors_low_freq),
            "entropy_permutation": stat(self.entropy_permutation),
            "warnings": list(self.warnings),
        }


def entropy_frequency_analysis(
    records: Sequence[PredictionRecord],
    n_perm: int = 10_000,
    seed: int = 0,
    log_freq_threshold: float = 8.0,
) -> EntropyFrequencyReport:
    """Correlate output entropy with log frequency, overall and per
    correctness group, plus a permutation test on the two entropy groups.

    The low-frequency reruns keep words with ``ln(frequency)`` below the
    threshold.  The permutation statistic is mean(errors) - mean(correct),
    so a positive value means errors carry more entropy.
    """
    if not records:
        raise DataError("no prediction records to analyze")
    for r in records:
        if r.frequency < 1:
            raise DataError(f"non-positive frequency for {r.word!r}: {r.frequency}")
    points = tuple(
        (r.entropy, math.log(r.frequency), r.correct) for r in records
    )
    warnings: list[str] = []

    def guarded_tau(name: str, pts: Sequence[tuple[float, float, bool]]):
        if len(pts) < 2:
            warnings.append(f"{name}: fewer than 2 points, tau skipped")
            return None
        try:
            return kendall_tau_b([p[0] for p in pts], [p[1] for p in pts])
        except DataError as exc:
            warnings.append(f"{name}: {exc}")
            return None

    correct_pts = [p for p in points if p[2]]
    error_pts = [p for p in points if not p[2]]
    low = [p for p in points if p[1] < log_freq_threshold]
    low_correct = [p for p in low if p[2]]
    low_errors = [p for p in low if not p[2]]

    mean_correct = float(np.mean([p[0] for p in correct_pts])) if correct_pts else None
    mean_errors = float(np.mean([p[0] for p in error_pts])) if error_pts else None

    if correct_pts and error_pts:
        permutation = fisher_pitman_permutation(
            [p[0] for p in error_pts], [p[0] for p in correct_pts],
            n_perm=n_perm, seed=seed,
        )
    else:
        permutation = None
        empty = "errors" if not error_pts else "correct"
        warnings.append(f"entropy permutation skipped: no {empty} predictions")

    return EntropyFrequencyReport(
        points=points,
        log_freq_threshold=log_freq_threshold,
        low_freq_share=len(low) / len(points),
        mean_entropy_correct=mean_correct,
        mean_entropy_errors=mean_errors,
        tau_overall=guarded_tau("tau_overall", points),
        tau_correct=guarded_tau("tau_correct", correct_pts),
        tau_errors=guarded_tau("tau_errors", error_pts),
        tau_correct_low_freq=guarded_tau("tau_correct_low_freq", low_correct),
        tau_errors_low_freq=guarded_tau("tau_errors_low_freq", low_errors),
        entropy_permutation=permutation,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class EvalReport:
    """Full evaluation summary, recomputable from the records alone."""

    n: int
    confusion: dict
    accuracy: float
    baseline_accuracy: float
    per_class: dict
    overall: dict
    entropy_summary: dict

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "confusion": self.confusion,
            "accuracy": self.accuracy,
            "baseline_accuracy": self.baseline_accuracy,
            "per_class": self.per_class,
            "overall": self.overall,
            "entropy_summary": self.entropy_summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def build_eval_report(records: Sequence[PredictionRecord]) -> EvalReport:
    """Confusion-derived metrics plus entropy summaries per correctness group."""
    if not records:
        raise DataError("no prediction records to evaluate")
    confusion = ConfusionMatrix.from_records(records)
    per_class = {}
    for cls in CLASSES:
        precision, recall, f_score = precision_recall_f(confusion, cls)
        support = confusion.support(cls)
        per_class[cls] = {
            "precision": precision,
            "recall": recall,
            "f_score": f_score,
            # recall doubles as the class accuracy used by weighted accuracy
            "accuracy": recall,
            "support": support,
        }
    supports = {cls: confusion.support(cls) for cls in CLASSES}
    total = confusion.total
    overall = {
        "aggregation": "support-weighted one-vs-rest average over classes",
        "precision": sum(per_class[c]["precision"] * supports[c] for c in CLASSES) / total,
        "recall": sum(per_class[c]["recall"] * supports[c] for c in CLASSES) / total,
        "f_score": sum(per_class[c]["f_score"] * supports[c] for c in CLASSES) / total,
    }
    correct_entropy = [r.entropy for r in records if r.correct]
    error_entropy = [r.entropy for r in records if not r.correct]

    def summary(values):
        if not values:
            return {"count": 0, "mean": None, "median": None}
        return {
            "count": len(values),
            "mean": float(np.mean(values)),
            "median": float(np.median(values)),
        }

    return EvalReport(
        n=total,
        confusion=confusion.to_dict(),
        accuracy=accuracy(confusion),
        baseline_accuracy=zero_rule_baseline(r.gold for r in records),
        per_class=per_class,
        overall=overall,
        entropy_summary={
            "correct": summary(correct_entropy),
            "errors": summary(error_entropy),
        },
    )
