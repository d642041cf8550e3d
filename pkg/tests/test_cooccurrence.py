from __future__ import annotations

import numpy as np
import pytest

from gendervec.cooccurrence import (
    CONTEXT_TYPES,
    ContextConfig,
    count_cooccurrences,
    load_cooccurrence,
    merge,
    save_cooccurrence,
)
from gendervec.corpus import build_vocabulary
from gendervec.errors import ConfigurationError, DataError


def _vocab_and_corpus():
    corpus = [["en", "stor", "hund"], ["en", "katt"]]
    return build_vocabulary(corpus), corpus


def _pair_count(cooc, vocab, ctx, tgt):
    return cooc.count(vocab.id_of(ctx), vocab.id_of(tgt))


def test_context_config_validation():
    ContextConfig("symmetric", 5)
    with pytest.raises(ConfigurationError):
        ContextConfig("backward", 1)  # must be the full name
    with pytest.raises(ConfigurationError):
        ContextConfig("symmetric", 0)
    with pytest.raises(ConfigurationError):
        ContextConfig("symmetric", 6)
    # the escape hatch admits larger windows explicitly
    ContextConfig("symmetric", 8, allow_large_window=True)


def test_context_config_dict_roundtrip():
    cfg = ContextConfig("asymmetric_forward", 3, distance_weighting=True)
    assert ContextConfig.from_dict(cfg.to_dict()) == cfg


def test_backward_window_1_by_hand():
    # "en stor hund": pairs (en->stor), (stor->hund); "en katt": (en->katt).
    vocab, corpus = _vocab_and_corpus()
    cooc = count_cooccurrences(corpus, vocab, ContextConfig("asymmetric_backward", 1))
    expect = {
        ("en", "stor"): 1,
        ("stor", "hund"): 1,
        ("en", "katt"): 1,
    }
    for (ctx, tgt), n in expect.items():
        assert _pair_count(cooc, vocab, ctx, tgt) == n
    assert cooc.total == 3


def test_backward_window_2_truncates_at_sentence_start():
    vocab, corpus = _vocab_and_corpus()
    cooc = count_cooccurrences(corpus, vocab, ContextConfig("asymmetric_backward", 2))
    # extra pair over w=1: en appears two before hund
    assert _pair_count(cooc, vocab, "en", "hund") == 1
    assert _pair_count(cooc, vocab, "stor", "hund") == 1
    assert cooc.total == 4


def test_forward_window_mirrors_backward():
    vocab, corpus = _vocab_and_corpus()
    back = count_cooccurrences(corpus, vocab, ContextConfig("asymmetric_backward", 2))
    fwd = count_cooccurrences(corpus, vocab, ContextConfig("asymmetric_forward", 2))
    # context/target swap roles between the two directions
    assert _pair_count(fwd, vocab, "hund", "en") == _pair_count(back, vocab, "en", "hund")
    assert _pair_count(fwd, vocab, "katt", "en") == _pair_count(back, vocab, "en", "katt")
    assert fwd.total == back.total


def test_symmetric_equals_backward_plus_forward():
    rng = np.random.default_rng(5)
    words = [f"w{i}" for i in range(12)]
    corpus = [
        [words[int(i)] for i in rng.integers(0, len(words), size=rng.integers(1, 9))]
        for _ in range(40)
    ]
    vocab = build_vocabulary(corpus)
    for w in (1, 3, 5):
        back = count_cooccurrences(corpus, vocab, ContextConfig("asymmetric_backward", w))
        fwd = count_cooccurrences(corpus, vocab, ContextConfig("asymmetric_forward", w))
        sym = count_cooccurrences(corpus, vocab, ContextConfig("symmetric", w))
        lhs = sym.matrix.toarray()
        rhs = back.matrix.toarray() + fwd.matrix.toarray()
        assert np.array_equal(lhs, rhs)


def test_oov_tokens_hold_position_but_add_nothing():
    corpus = [["en", "stor", "hund"]]
    vocab = build_vocabulary([["en", "hund"]])  # "stor" is out of vocabulary
    cooc = count_cooccurrences(corpus, vocab, ContextConfig("asymmetric_backward", 1))
    # "stor" occupies the slot between en and hund, so no (en, hund) pair at w=1
    assert cooc.total == 0
    cooc2 = count_cooccurrences(corpus, vocab, ContextConfig("asymmetric_backward", 2))
    assert _pair_count(cooc2, vocab, "en", "hund") == 1
    assert cooc2.total == 1


def test_distance_weighting():
    corpus = [["a", "b", "c"]]
    vocab = build_vocabulary(corpus)
    cfg = ContextConfig("asymmetric_backward", 2, distance_weighting=True)
    cooc = count_cooccurrences(corpus, vocab, cfg)
    assert _pair_count(cooc, vocab, "b", "c") == pytest.approx(1.0)
    assert _pair_count(cooc, vocab, "a", "c") == pytest.approx(0.5)
    assert _pair_count(cooc, vocab, "a", "b") == pytest.approx(1.0)


def test_merge_equals_whole_corpus_count():
    rng = np.random.default_rng(17)
    words = [f"w{i}" for i in range(10)]
    corpus = [
        [words[int(i)] for i in rng.integers(0, len(words), size=rng.integers(2, 7))]
        for _ in range(60)
    ]
    vocab = build_vocabulary(corpus)
    cfg = ContextConfig("symmetric", 2)
    whole = count_cooccurrences(corpus, vocab, cfg)
    part_a = count_cooccurrences(corpus[:25], vocab, cfg)
    part_b = count_cooccurrences(corpus[25:], vocab, cfg)
    merged = merge(part_a, part_b)
    assert np.array_equal(merged.matrix.toarray(), whole.matrix.toarray())


def test_merge_rejects_mismatched_configs():
    vocab, corpus = _vocab_and_corpus()
    a = count_cooccurrences(corpus, vocab, ContextConfig("symmetric", 1))
    b = count_cooccurrences(corpus, vocab, ContextConfig("symmetric", 2))
    with pytest.raises(ConfigurationError):
        merge(a, b)


def test_entries_sorted_and_complete():
    vocab, corpus = _vocab_and_corpus()
    cooc = count_cooccurrences(corpus, vocab, ContextConfig("symmetric", 2))
    entries = list(cooc.entries())
    assert entries == sorted(entries, key=lambda e: (e[0], e[1]))
    assert len(entries) == cooc.nnz
    assert sum(v for _, _, v in entries) == pytest.approx(cooc.total)


def test_save_load_roundtrip(tmp_path):
    vocab, corpus = _vocab_and_corpus()
    for weighting in (False, True):
        cfg = ContextConfig("symmetric", 2, distance_weighting=weighting)
        cooc = count_cooccurrences(corpus, vocab, cfg)
        path = tmp_path / f"cooc_{weighting}.txt"
        save_cooccurrence(cooc, path)
        loaded = load_cooccurrence(path)
        assert loaded.config == cfg
        assert np.array_equal(loaded.matrix.toarray(), cooc.matrix.toarray())


def test_load_rejects_garbage(tmp_path):
    path = tmp_path / "cooc.txt"
    path.write_text("not json\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_cooccurrence(path)


def test_context_types_constant():
    assert CONTEXT_TYPES == ("asymmetric_backward", "asymmetric_forward", "symmetric")
