"""Truncated SVD against a dense oracle, plus embedding plumbing."""

import numpy as np
import pytest
from scipy import sparse

from gendervec.cooccurrence import ContextConfig, count_cooccurrences
from gendervec.corpus import build_vocabulary
from gendervec.embedding import (
    EmbeddingConfig,
    EmbeddingMatrix,
    embed,
    embed_counts,
    load_embedding_binary,
    load_embedding_text,
    power_transform,
    save_embedding_binary,
    save_embedding_text,
    truncated_svd,
)
from gendervec.errors import ConfigurationError, DataError, NumericalError


# Oracle: full dense SVD via LAPACK, truncated after the fact.  Written
# before looking at the randomized implementation; the only shared piece
# is the sign convention, which both sides need for comparability.
def dense_svd_oracle(matrix, k):
    dense = matrix.toarray() if sparse.issparse(matrix) else np.asarray(matrix, dtype=float)
    _, s, vt = np.linalg.svd(dense, full_matrices=False)
    sigma = s[:k].copy()
    v = vt[:k].T.copy()
    for j in range(v.shape[1]):
        lead = int(np.argmax(np.abs(v[:, j])))
        if v[lead, j] < 0:
            v[:, j] = -v[:, j]
    return sigma, v


def test_diagonal_matrix_exact():
    sigma, v = truncated_svd(np.diag([3.0, 2.0, 1.0]), 2)
    assert np.allclose(sigma, [3.0, 2.0])
    assert np.allclose(v, np.eye(3)[:, :2], atol=1e-12)


def test_rank_one_matrix():
    rng = np.random.default_rng(7)
    u = rng.standard_normal(12)
    w = rng.standard_normal(9)
    sigma, v = truncated_svd(np.outer(u, w), 1)
    assert sigma[0] == pytest.approx(np.linalg.norm(u) * np.linalg.norm(w), rel=1e-12)
    unit = w / np.linalg.norm(w)
    if unit[int(np.argmax(np.abs(unit)))] < 0:
        unit = -unit
    assert np.allclose(v[:, 0], unit, atol=1e-10)


def test_matches_dense_oracle_random():
    rng = np.random.default_rng(42)
    for trial in range(40):
        m = int(rng.integers(2, 65))
        n = int(rng.integers(2, 65))
        cap = min(m, n)
        # Alternate between the sketch-exact path (wide sketch covers the
        # rank) and the subspace-iteration path.
        if trial % 2 == 0:
            k = int(rng.integers(max(1, cap - 5), cap + 1))
        else:
            k = int(rng.integers(1, max(2, cap - 10)))
        mat = rng.standard_normal((m, n))
        if trial % 3 == 0:
            mat = sparse.csr_array(np.where(rng.random((m, n)) < 0.5, mat, 0.0))
        sigma, v = truncated_svd(mat, k, seed=trial)
        ref_sigma, ref_v = dense_svd_oracle(mat, k)
        assert np.max(np.abs(sigma - ref_sigma)) <= 1e-6
        assert np.max(np.abs(v - ref_v)) <= 1e-5
        assert np.all(np.diff(sigma) <= 1e-12)
        assert np.all(sigma >= 0)
        gram = v.T @ v
        assert np.max(np.abs(gram - np.eye(k))) <= 1e-8


def test_seed_determinism():
    rng = np.random.default_rng(0)
    mat = rng.standard_normal((30, 25))
    s1, v1 = truncated_svd(mat, 4, seed=11)
    s2, v2 = truncated_svd(mat, 4, seed=11)
    assert np.array_equal(s1, s2)
    assert np.array_equal(v1, v2)
    s3, v3 = truncated_svd(mat, 4, seed=12)
    assert np.allclose(s1, s3, atol=1e-8)
    assert np.allclose(v1, v3, atol=1e-6)


def test_sign_convention_largest_component_non_negative():
    rng = np.random.default_rng(5)
    for seed in range(10):
        mat = rng.standard_normal((20, 15))
        _, v = truncated_svd(mat, 6, seed=seed)
        for j in range(v.shape[1]):
            lead = int(np.argmax(np.abs(v[:, j])))
            assert v[lead, j] >= 0


def test_sign_convention_tie_takes_first_index():
    # Right singular vectors [1,1]/sqrt(2) and [1,-1]/sqrt(2): both
    # components tie in magnitude, so the first one must end up >= 0.
    root = 1.0 / np.sqrt(2.0)
    vt = np.array([[root, root], [root, -root]])
    mat = np.diag([2.0, 1.0]) @ vt
    _, v = truncated_svd(mat, 2)
    assert v[0, 0] > 0
    assert v[0, 1] > 0
    assert np.allclose(np.abs(v), root, atol=1e-10)


def test_k_out_of_range():
    mat = np.ones((4, 3))
    with pytest.raises(ConfigurationError):
        truncated_svd(mat, 0)
    with pytest.raises(ConfigurationError):
        truncated_svd(mat, 4)
    with pytest.raises(ConfigurationError):
        truncated_svd(np.empty((0, 5)), 1)


def test_non_convergence_reports_residual():
    rng = np.random.default_rng(3)
    mat = rng.standard_normal((40, 30))
    with pytest.raises(NumericalError, match="residual"):
        truncated_svd(mat, 5, max_iter=1)


def _toy_cooc(alpha_counts=None):
    corpus = [["en", "hund"], ["en", "katt"], ["ett", "hus"], ["ett", "barn"], ["en", "hund"]]
    vocab = build_vocabulary(corpus)
    cooc = count_cooccurrences(corpus, vocab, ContextConfig("asymmetric_backward", 1))
    return corpus, vocab, cooc


def test_power_transform_values_and_sparsity():
    _, _, cooc = _toy_cooc()
    out = power_transform(cooc, 0.5)
    assert out.nnz == cooc.matrix.nnz
    assert np.allclose(out.data, np.sqrt(cooc.matrix.data))
    # the original matrix is left untouched
    assert np.allclose(cooc.matrix.data, np.round(cooc.matrix.data))


def test_power_transform_rejects_bad_alpha():
    _, _, cooc = _toy_cooc()
    with pytest.raises(ConfigurationError):
        power_transform(cooc, 0.0)
    with pytest.raises(ConfigurationError):
        power_transform(cooc, -1.0)


def test_power_transform_overflow_is_numerical_error():
    _, _, cooc = _toy_cooc()
    cooc.matrix.data *= 1e300
    with pytest.raises(NumericalError):
        power_transform(cooc, 8.0)


def test_embedding_config_validation_and_roundtrip():
    with pytest.raises(ConfigurationError):
        EmbeddingConfig(k=0)
    with pytest.raises(ConfigurationError):
        EmbeddingConfig(alpha=0.0)
    cfg = EmbeddingConfig(k=10, alpha=0.75, sigma_power=1.0, seed=9)
    assert EmbeddingConfig.from_dict(cfg.to_dict()) == cfg
    assert cfg.to_dict()["K"] == 10


def test_embedding_matrix_accessors_and_validation():
    vecs = np.arange(6.0).reshape(3, 2)
    emb = EmbeddingMatrix(["a", "b", "c"], vecs)
    assert len(emb) == 3
    assert emb.k == 2
    assert "b" in emb and "z" not in emb
    assert np.array_equal(emb.vector("c"), [4.0, 5.0])
    with pytest.raises(KeyError):
        emb.vector("z")
    with pytest.raises(DataError):
        EmbeddingMatrix(["a", "a"], vecs[:2])
    with pytest.raises(ConfigurationError):
        EmbeddingMatrix(["a", "b"], vecs)
    with pytest.raises(ConfigurationError):
        EmbeddingMatrix(["a"], np.ones(3))


def test_embed_counts_gram_reproduces_full_rank_product():
    _, vocab, cooc = _toy_cooc()
    cfg = EmbeddingConfig(k=len(vocab), alpha=1.0, sigma_power=1.0)
    emb = embed_counts(cooc, vocab, cfg)
    gram = emb.matrix @ emb.matrix.T
    target = (cooc.matrix.T @ cooc.matrix).toarray()
    assert np.max(np.abs(gram - target)) <= 1e-6


def test_embed_separates_article_groups_in_two_dims():
    corpus, vocab, _ = _toy_cooc()
    emb = embed(corpus, vocab, ContextConfig("asymmetric_backward", 1), EmbeddingConfig(k=2, alpha=0.5))
    en_nouns = np.array([emb.vector(w) for w in ("hund", "katt")])
    ett_nouns = np.array([emb.vector(w) for w in ("hus", "barn")])
    direction = en_nouns.mean(axis=0) - ett_nouns.mean(axis=0)
    lo = (en_nouns @ direction).min()
    hi = (ett_nouns @ direction).max()
    assert lo > hi + 1e-6


def test_embed_counts_vocab_mismatch():
    corpus, vocab, cooc = _toy_cooc()
    other = build_vocabulary([["x", "y"]])
    with pytest.raises(ConfigurationError):
        embed_counts(cooc, other, EmbeddingConfig(k=1))


def test_embed_empty_matrix_fails():
    vocab = build_vocabulary([])
    with pytest.raises(ConfigurationError):
        embed([], vocab, ContextConfig("asymmetric_backward", 1), EmbeddingConfig(k=1))


def test_embed_overflowing_alpha_is_numerical_error():
    corpus, vocab, cooc = _toy_cooc()
    cooc.matrix.data *= 1e100
    with pytest.raises(NumericalError):
        embed_counts(cooc, vocab, EmbeddingConfig(k=1, alpha=4.0))


def test_sigma_power_rescales_columns():
    _, vocab, cooc = _toy_cooc()
    flat = embed_counts(cooc, vocab, EmbeddingConfig(k=2, alpha=0.5, sigma_power=0.0))
    scaled = embed_counts(cooc, vocab, EmbeddingConfig(k=2, alpha=0.5, sigma_power=1.0))
    sigma, _ = dense_svd_oracle(power_transform(cooc, 0.5), 2)
    assert np.allclose(scaled.matrix, flat.matrix * sigma, atol=1e-10)


def test_text_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    emb = EmbeddingMatrix(["alpha", "beta", "gamma"], rng.standard_normal((3, 4)))
    path = tmp_path / "emb.txt"
    save_embedding_text(emb, path)
    back = load_embedding_text(path)
    assert back.words == emb.words
    # repr() round-trips float64 exactly
    assert np.array_equal(back.matrix, emb.matrix)


def test_text_malformed(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("not a header\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_embedding_text(path)
    path.write_text("2 3\nw1 0.5 0.5\nw2 0.5 0.5 0.5\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_embedding_text(path)


def test_binary_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    emb = EmbeddingMatrix(["ö", "NUMBER", "x"], rng.standard_normal((3, 5)))
    path = tmp_path / "emb.bin"
    save_embedding_binary(emb, path)
    back = load_embedding_binary(path)
    assert back.words == emb.words
    assert np.array_equal(back.matrix, emb.matrix)


def test_binary_bad_magic(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"NOTMAGIC" + b"\x00" * 32)
    with pytest.raises(DataError):
        load_embedding_binary(path)


def test_binary_truncated(tmp_path):
    rng = np.random.default_rng(4)
    emb = EmbeddingMatrix(["a", "b"], rng.standard_normal((2, 3)))
    path = tmp_path / "emb.bin"
    save_embedding_binary(emb, path)
    data = path.read_bytes()
    path.write_bytes(data[:-8])
    with pytest.raises(DataError):
        load_embedding_binary(path)
