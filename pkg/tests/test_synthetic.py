"""Synthetic agreement-language generator."""

from collections import Counter

import pytest

from gendervec.errors import ConfigurationError
from gendervec.synthetic import (
    SyntheticClass,
    SyntheticSpec,
    generate_synthetic_language,
    measure_agreement,
    write_corpus,
)


def _lookup_tables(spec, language):
    article_class = {a: cls.code for cls in spec.classes for a in cls.articles}
    noun_class = {n: code for code, nouns in language.nouns_by_class.items() for n in nouns}
    return article_class, noun_class, set(language.fillers)


def test_default_spec_splits_nouns_700_300():
    spec = SyntheticSpec(sentence_count=50)
    language = generate_synthetic_language(spec)
    counts = language.lexicon.counts_by_code()
    assert counts["u"] == 700
    assert counts["n"] == 300
    assert len(language.lexicon) == 1000


def test_sentences_are_fillers_article_noun_fillers():
    spec = SyntheticSpec(noun_count=60, filler_count=12, sentence_count=400, seed=5)
    language = generate_synthetic_language(spec)
    article_class, noun_class, fillers = _lookup_tables(spec, language)
    assert len(language.sentences) == 400
    for sentence in language.sentences:
        positions = [i for i, tok in enumerate(sentence) if tok in article_class]
        assert len(positions) == 1
        at = positions[0]
        assert sentence[at + 1] in noun_class
        assert all(tok in fillers for tok in sentence[:at])
        assert all(tok in fillers for tok in sentence[at + 2 :])
        assert at <= spec.max_leading_fillers
        assert len(sentence) - (at + 2) <= spec.max_trailing_fillers


def test_clean_spec_agrees_everywhere():
    spec = SyntheticSpec(noun_count=40, sentence_count=500, seed=1)
    language = generate_synthetic_language(spec)
    assert measure_agreement(language, spec) == 1.0
    article_class, noun_class, _ = _lookup_tables(spec, language)
    for sentence in language.sentences:
        at = next(i for i, tok in enumerate(sentence) if tok in article_class)
        assert article_class[sentence[at]] == noun_class[sentence[at + 1]]


def test_agreement_noise_measured_post_hoc():
    spec = SyntheticSpec(noun_count=80, sentence_count=20_000, seed=2, agreement_noise=0.1)
    language = generate_synthetic_language(spec)
    assert measure_agreement(language, spec) == pytest.approx(0.9, abs=0.01)


def test_both_articles_of_a_class_occur():
    spec = SyntheticSpec(noun_count=40, sentence_count=2000, seed=3)
    language = generate_synthetic_language(spec)
    used = Counter(tok for sentence in language.sentences for tok in sentence)
    for article in ("en", "denna", "ett", "detta"):
        assert used[article] > 0


def test_minimal_two_nouns_two_sentences():
    spec = SyntheticSpec(noun_count=2, sentence_count=2, filler_count=1)
    language = generate_synthetic_language(spec)
    assert len(language.sentences) == 2
    assert len(language.lexicon) == 2
    assert {len(nouns) for nouns in language.nouns_by_class.values()} == {1}


def test_seed_determinism():
    spec = SyntheticSpec(noun_count=30, sentence_count=300, seed=9)
    a = generate_synthetic_language(spec)
    b = generate_synthetic_language(spec)
    assert a.sentences == b.sentences
    assert dict(a.lexicon.items()) == dict(b.lexicon.items())
    c = generate_synthetic_language(SyntheticSpec(noun_count=30, sentence_count=300, seed=10))
    assert a.sentences != c.sentences


def test_zipf_exponent_skews_noun_frequencies():
    flat_spec = SyntheticSpec(noun_count=200, sentence_count=20_000, seed=4, zipf_exponent=0.0)
    skew_spec = SyntheticSpec(noun_count=200, sentence_count=20_000, seed=4, zipf_exponent=1.1)
    _, flat_nouns, _ = _lookup_tables(flat_spec, flat := generate_synthetic_language(flat_spec))
    _, skew_nouns, _ = _lookup_tables(skew_spec, skew := generate_synthetic_language(skew_spec))

    def max_over_mean(language, noun_class):
        counts = Counter(
            tok for sentence in language.sentences for tok in sentence if tok in noun_class
        )
        return max(counts.values()) / (sum(counts.values()) / len(noun_class))

    assert max_over_mean(flat, flat_nouns) < 2.0
    assert max_over_mean(skew, skew_nouns) > 5.0


def test_ambiguous_noun_bookkeeping():
    spec = SyntheticSpec(noun_count=200, sentence_count=50, seed=6, ambiguous_fraction=0.05)
    language = generate_synthetic_language(spec)
    assert len(language.ambiguous_nouns) == 10
    _, noun_class, _ = _lookup_tables(spec, language)
    assert set(language.ambiguous_nouns) <= set(noun_class)
    clean = generate_synthetic_language(SyntheticSpec(noun_count=200, sentence_count=50))
    assert clean.ambiguous_nouns == ()


def test_spec_validation():
    uter = SyntheticClass(code="u", articles=("en",), prior=1.0)
    with pytest.raises(ConfigurationError):
        SyntheticSpec(classes=(uter,))
    with pytest.raises(ConfigurationError):
        SyntheticSpec(
            classes=(
                SyntheticClass(code="u", articles=("en",), prior=0.5),
                SyntheticClass(code="n", articles=("en",), prior=0.5),
            )
        )
    with pytest.raises(ConfigurationError):
        SyntheticSpec(
            classes=(
                SyntheticClass(code="u", articles=("en",), prior=0.5),
                SyntheticClass(code="u", articles=("ett",), prior=0.5),
            )
        )
    with pytest.raises(ConfigurationError):
        SyntheticSpec(
            classes=(
                SyntheticClass(code="u", articles=("en",), prior=0.6),
                SyntheticClass(code="n", articles=("ett",), prior=0.6),
            )
        )
    with pytest.raises(ConfigurationError):
        SyntheticSpec(noun_count=1)
    with pytest.raises(ConfigurationError):
        SyntheticSpec(filler_count=0)
    with pytest.raises(ConfigurationError):
        SyntheticSpec(sentence_count=0)
    with pytest.raises(ConfigurationError):
        SyntheticSpec(agreement_noise=1.5)
    with pytest.raises(ConfigurationError):
        SyntheticSpec(ambiguous_fraction=-0.1)
    with pytest.raises(ConfigurationError):
        SyntheticSpec(zipf_exponent=-1.0)
    with pytest.raises(ConfigurationError):
        SyntheticSpec(max_leading_fillers=-1)


def test_write_corpus_one_sentence_per_line(tmp_path):
    spec = SyntheticSpec(noun_count=10, sentence_count=25, seed=8)
    language = generate_synthetic_language(spec)
    path = tmp_path / "corpus.txt"
    write_corpus(language, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines == [" ".join(sentence) for sentence in language.sentences]
