"""Dense word vectors from power-transformed co-occurrence counts.

Counts are raised elementwise to a power ``alpha`` (default 0.5, which
tempers high-frequency contexts), then a truncated SVD keeps the top-K
right singular vectors; the row for a target word, optionally scaled by
``sigma**sigma_power``, is its embedding.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .cooccurrence import ContextConfig, CoocMatrix, count_cooccurrences
from .corpus import Sentence, Vocabulary
from .errors import ConfigurationError, DataError, NumericalError

EMBEDDING_MAGIC = b"RSVEMB01"


@dataclass(frozen=True)
class EmbeddingConfig:
    k: int = 50
    alpha: float = 0.5
    sigma_power: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ConfigurationError(f"K must be >= 1, got {self.k}")
        if self.alpha <= 0:
            raise ConfigurationError(f"alpha must be > 0, got {self.alpha}")

    def to_dict(self) -> dict:
        return {
            "K": self.k,
            "alpha": self.alpha,
            "sigma_power": self.sigma_power,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EmbeddingConfig":
        return cls(
            k=int(data["K"]),
            alpha=float(data.get("alpha", 0.5)),
            sigma_power=float(data.get("sigma_power", 0.0)),
            seed=int(data.get("seed", 0)),
        )


def power_transform(cooc: CoocMatrix, alpha: float) -> sparse.csr_array:
    """Raise every stored count to ``alpha``, preserving sparsity."""
    if alpha <= 0:
        raise ConfigurationError(f"alpha must be > 0, got {alpha}")
    out = cooc.matrix.copy()
    with np.errstate(over="ignore"):
        out.data = np.power(out.data, alpha)
    if not np.all(np.isfinite(out.data)):
        raise NumericalError(f"count**{alpha} overflowed the float64 range")
    return out


def truncated_svd(
    matrix,
    k: int,
    *,
    seed: int = 0,
    oversample: int = 10,
    max_iter: int = 500,
    convergence_tol: float = 1e-10,
) -> tuple[np.ndarray, np.ndarray]:
    """Top-``k`` singular values and right singular vectors of ``matrix``.

    Parameters
    ----------
    matrix : (m, n) ndarray or scipy sparse array
    k : number of singular triplets to keep, ``1 <= k <= min(m, n)``
    seed : seeds the random range finder; fixed seed means bitwise
        reproducible output on one platform
    oversample : extra subspace columns carried during iteration
    max_iter : cap on subspace iterations before giving up
    convergence_tol : iteration stops once the largest relative residual
        ``|M^T u - sigma v| / sigma_1`` over the kept triplets drops
        below this

    Returns
    -------
    (sigma, v) : ``sigma`` descending with shape (k,), ``v`` column-
        orthonormal with shape (n, k).  Each column of ``v`` is flipped
        so its largest-magnitude component is non-negative.

    Raises
    ------
    ConfigurationError : ``k`` outside ``1..min(m, n)`` (an empty matrix
        therefore always fails)
    NumericalError : no convergence within ``max_iter``; the message
        reports the residual actually achieved
    """
    m, n = matrix.shape
    rank_cap = min(m, n)
    if k < 1 or k > rank_cap:
        raise ConfigurationError(f"k must be in 1..{rank_cap} for shape {(m, n)}, got {k}")
    rng = np.random.default_rng(seed)
    width = min(k + oversample, rank_cap)
    gauss = rng.standard_normal((n, width))
    q_basis, _ = np.linalg.qr(matrix @ gauss)

    if width == rank_cap:
        # The sketch spans the whole column space, so the projected
        # problem is the exact one.
        b = (matrix.T @ q_basis).T
        _, s, vt = np.linalg.svd(b, full_matrices=False)
        return _fix_signs(s[:k].copy(), vt[:k].T.copy())

    ritz = None
    achieved = np.inf
    for _ in range(max_iter):
        t = matrix.T @ q_basis
        if ritz is not None:
            p_prev, w_r, s_prev, u_r = ritz
            # One-sided residual: the M v - sigma u side vanishes by
            # construction, so this alone certifies the triplets.
            resid = t @ u_r[:, :k] - (p_prev @ w_r[:, :k]) * s_prev[:k]
            scale = max(s_prev[0], np.finfo(float).tiny)
            achieved = float(np.linalg.norm(resid, axis=0).max() / scale)
            if achieved <= convergence_tol:
                return _fix_signs(s_prev[:k].copy(), p_prev @ w_r[:, :k])
        p_basis, _ = np.linalg.qr(t)
        q_basis, r = np.linalg.qr(matrix @ p_basis)
        u_r, s, w_rt = np.linalg.svd(r)
        ritz = (p_basis, w_rt.T, s, u_r)
    raise NumericalError(
        f"truncated SVD did not converge in {max_iter} iterations; "
        f"max relative residual {achieved:.3e} (tol {convergence_tol:.1e})"
    )


def _fix_signs(sigma: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Deterministic orientation: largest-magnitude component of each
    # column is made non-negative (first index wins ties).
    for j in range(v.shape[1]):
        lead = int(np.argmax(np.abs(v[:, j])))
        if v[lead, j] < 0:
            v[:, j] = -v[:, j]
    return sigma, v


class EmbeddingMatrix:
    """Per-word dense vectors plus the configs that produced them."""

    def __init__(
        self,
        words: Sequence[str],
        vectors: np.ndarray,
        context: ContextConfig | None = None,
        config: EmbeddingConfig | None = None,
    ):
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim != 2:
            raise ConfigurationError(f"vectors must be 2-D, got shape {vectors.shape}")
        if len(words) != vectors.shape[0]:
            raise ConfigurationError(
                f"{len(words)} words but {vectors.shape[0]} vector rows"
            )
        self._words = tuple(words)
        self._index = {w: i for i, w in enumerate(self._words)}
        if len(self._index) != len(self._words):
            raise DataError("duplicate words in embedding")
        self.matrix = vectors
        self.context = context
        self.config = config

    def __len__(self) -> int:
        return len(self._words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    @property
    def k(self) -> int:
        return self.matrix.shape[1]

    @property
    def words(self) -> tuple[str, ...]:
        return self._words

    def vector(self, word: str) -> np.ndarray:
        try:
            return self.matrix[self._index[word]]
        except KeyError:
            raise KeyError(f"word not in embedding: {word!r}") from None


def embed_counts(cooc: CoocMatrix, vocab: Vocabulary, config: EmbeddingConfig) -> EmbeddingMatrix:
    """Transform counts and factor them into word vectors."""
    if len(vocab) != cooc.shape[1]:
        raise ConfigurationError(
            f"vocabulary size {len(vocab)} does not match matrix dims {cooc.shape}"
        )
    transformed = power_transform(cooc, config.alpha)
    sigma, v = truncated_svd(transformed, config.k, seed=config.seed)
    vectors = v * np.power(sigma, config.sigma_power)
    if not np.all(np.isfinite(vectors)):
        raise NumericalError("non-finite embedding values; check sigma_power against zero sigma")
    return EmbeddingMatrix(vocab.words, vectors, context=cooc.config, config=config)


def embed(
    corpus: Iterable[Sentence],
    vocab: Vocabulary,
    context_config: ContextConfig,
    embedding_config: EmbeddingConfig,
) -> EmbeddingMatrix:
    """Count, transform and factor in one step."""
    cooc = count_cooccurrences(corpus, vocab, context_config)
    return embed_counts(cooc, vocab, embedding_config)


def save_embedding_text(emb: EmbeddingMatrix, path) -> None:
    """Write ``|V| K`` then one ``word v1 .. vK`` line per word."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(emb)} {emb.k}\n")
        for word, row in zip(emb.words, emb.matrix):
            values = " ".join(repr(float(x)) for x in row)
            fh.write(f"{word} {values}\n")


def load_embedding_text(path) -> EmbeddingMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise DataError(f"{path}: malformed header line")
        try:
            n, k = int(header[0]), int(header[1])
        except ValueError:
            raise DataError(f"{path}: malformed header line") from None
        words: list[str] = []
        rows = np.empty((n, k), dtype=np.float64)
        for i in range(n):
            parts = fh.readline().split()
            if len(parts) != k + 1:
                raise DataError(f"{path}: row {i} has {len(parts) - 1} values, expected {k}")
            words.append(parts[0])
            rows[i] = [float(x) for x in parts[1:]]
    return EmbeddingMatrix(words, rows)


def save_embedding_binary(emb: EmbeddingMatrix, path) -> None:
    """Binary variant: magic, word count, K, then length-prefixed words
    each followed by K little-endian float64 values."""
    with open(path, "wb") as fh:
        fh.write(EMBEDDING_MAGIC)
        fh.write(struct.pack("<QQ", len(emb), emb.k))
        for word, row in zip(emb.words, emb.matrix):
            encoded = word.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(np.ascontiguousarray(row, dtype="<f8").tobytes())


def load_embedding_binary(path) -> EmbeddingMatrix:
    with open(path, "rb") as fh:
        magic = fh.read(len(EMBEDDING_MAGIC))
        if magic != EMBEDDING_MAGIC:
            raise DataError(f"{path}: bad magic {magic!r}")
        n, k = struct.unpack("<QQ", fh.read(16))
        words: list[str] = []
        rows = np.empty((n, k), dtype=np.float64)
        for i in range(n):
            (length,) = struct.unpack("<I", fh.read(4))
            words.append(fh.read(length).decode("utf-8"))
            buf = fh.read(8 * k)
            if len(buf) != 8 * k:
                raise DataError(f"{path}: truncated vector block at row {i}")
            rows[i] = np.frombuffer(buf, dtype="<f8")
    return EmbeddingMatrix(words, rows)
