"""Windowed co-occurrence counting over a fixed vocabulary.

Counts live in a sparse context-row by target-column matrix.  Windows
are positional and truncate at sentence boundaries; out-of-vocabulary
tokens keep their position but contribute nothing, neither as context
nor as target.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np
from scipy import sparse

from .corpus import Sentence, Vocabulary
from .errors import ConfigurationError, DataError

CONTEXT_TYPES = ("asymmetric_backward", "asymmetric_forward", "symmetric")

# Supported window sizes; anything larger needs the explicit override.
MAX_WINDOW = 5


@dataclass(frozen=True)
class ContextConfig:
    context_type: str
    window_size: int
    distance_weighting: bool = False
    allow_large_window: bool = False

    def __post_init__(self):
        if self.context_type not in CONTEXT_TYPES:
            raise ConfigurationError(
                f"context_type must be one of {CONTEXT_TYPES}, got {self.context_type!r}"
            )
        if self.window_size < 1:
            raise ConfigurationError(f"window_size must be >= 1, got {self.window_size}")
        if self.window_size > MAX_WINDOW and not self.allow_large_window:
            raise ConfigurationError(
                f"window_size {self.window_size} exceeds {MAX_WINDOW}; "
                "set allow_large_window to override"
            )

    def to_dict(self) -> dict:
        return {
            "context_type": self.context_type,
            "window_size": self.window_size,
            "distance_weighting": self.distance_weighting,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ContextConfig":
        return cls(
            context_type=data["context_type"],
            window_size=int(data["window_size"]),
            distance_weighting=bool(data.get("distance_weighting", False)),
            allow_large_window=bool(data.get("allow_large_window", False)),
        )


class CoocMatrix:
    """Sparse (context, target) count matrix plus the config that built it."""

    def __init__(self, matrix: sparse.csr_array, config: ContextConfig):
        if matrix.shape[0] != matrix.shape[1]:
            # contexts and targets share one vocabulary
            raise ConfigurationError(f"expected a square matrix, got {matrix.shape}")
        self.matrix = matrix
        self.config = config

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    @property
    def total(self) -> float:
        return float(self.matrix.sum())

    def count(self, context_id: int, target_id: int) -> float:
        return float(self.matrix[context_id, target_id])

    def entries(self) -> Iterator[tuple[int, int, float]]:
        """Yield ``(context_id, target_id, count)`` sorted by (row, col)."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        for i in order:
            yield int(coo.row[i]), int(coo.col[i]), float(coo.data[i])


def count_cooccurrences(
    corpus: Iterable[Sentence], vocab: Vocabulary, config: ContextConfig
) -> CoocMatrix:
    """Count windowed (context, target) pairs over the corpus.

    For a target at position ``i``, the backward window covers positions
    ``i-w..i-1``, the forward window ``i+1..i+w``, and the symmetric type
    both.  Each pair contributes weight 1, or ``1/distance`` when
    distance weighting is on.
    """
    n = len(vocab)
    backward = config.context_type in ("asymmetric_backward", "symmetric")
    forward = config.context_type in ("asymmetric_forward", "symmetric")
    w = config.window_size
    counts: dict[tuple[int, int], float] = {}
    for sentence in corpus:
        ids = [vocab.id_of(tok) if tok in vocab else -1 for tok in sentence]
        length = len(ids)
        for i, target in enumerate(ids):
            if target < 0:
                continue
            if backward:
                for j in range(max(0, i - w), i):
                    context = ids[j]
                    if context < 0:
                        continue
                    weight = 1.0 / (i - j) if config.distance_weighting else 1.0
                    key = (context, target)
                    counts[key] = counts.get(key, 0.0) + weight
            if forward:
                for j in range(i + 1, min(length, i + w + 1)):
                    context = ids[j]
                    if context < 0:
                        continue
                    weight = 1.0 / (j - i) if config.distance_weighting else 1.0
                    key = (context, target)
                    counts[key] = counts.get(key, 0.0) + weight
    return CoocMatrix(_to_csr(counts, n), config)


def _to_csr(counts: dict[tuple[int, int], float], n: int) -> sparse.csr_array:
    if not counts:
        return sparse.csr_array((n, n), dtype=np.float64)
    keys = sorted(counts)
    rows = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
    cols = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
    data = np.fromiter((counts[k] for k in keys), dtype=np.float64, count=len(keys))
    return sparse.csr_array((data, (rows, cols)), shape=(n, n))


def merge(a: CoocMatrix, b: CoocMatrix) -> CoocMatrix:
    """Add two shard counts; configs and dims must match."""
    if a.config != b.config:
        raise ConfigurationError(
            f"cannot merge counts built with different configs: {a.config} vs {b.config}"
        )
    if a.shape != b.shape:
        raise ConfigurationError(f"cannot merge counts with shapes {a.shape} and {b.shape}")
    merged = (a.matrix + b.matrix).tocsr()
    merged.sort_indices()
    return CoocMatrix(merged, a.config)


def save_cooccurrence(cooc: CoocMatrix, path) -> None:
    """Write a JSON header line, then ``context_id<TAB>target_id<TAB>count`` triplets."""
    header = {"rows": cooc.shape[0], "cols": cooc.shape[1], **cooc.config.to_dict()}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for row, col, value in cooc.entries():
            text = str(int(value)) if value == int(value) else repr(value)
            fh.write(f"{row}\t{col}\t{text}\n")


def load_cooccurrence(path) -> CoocMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            header = json.loads(fh.readline())
        except json.JSONDecodeError:
            raise DataError(f"{path}: missing or malformed JSON header") from None
        n = int(header["rows"])
        if int(header["cols"]) != n:
            raise DataError(f"{path}: non-square dims in header")
        config = ContextConfig.from_dict(header)
        counts: dict[tuple[int, int], float] = {}
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 tab-separated fields")
            try:
                row, col, value = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise DataError(f"{path}:{lineno}: malformed triplet") from None
            if not (0 <= row < n and 0 <= col < n):
                raise DataError(f"{path}:{lineno}: index out of range")
            counts[(row, col)] = value
    return CoocMatrix(_to_csr(counts, n), config)
