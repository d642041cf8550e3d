from __future__ import annotations

import pytest

from gendervec.corpus import (
    NUMBER_TOKEN,
    Vocabulary,
    build_vocabulary,
    filter_by_frequency,
    iter_corpus_lines,
    load_vocabulary,
    normalize_line,
    read_sentences,
    save_vocabulary,
)
from gendervec.errors import ConfigurationError, DataError


def test_normalize_swedish_example():
    assert normalize_line("Han har 3 hundar.") == ["han", "har", "NUMBER", "hundar", "."]


def test_normalize_lowercases_words():
    assert normalize_line("Stockholm OCH Malmö") == ["stockholm", "och", "malmö"]


def test_normalize_number_with_separators():
    assert normalize_line("pi är 3,14") == ["pi", "är", "NUMBER"]
    assert normalize_line("kl 12:30") == ["kl", "NUMBER"]
    assert normalize_line("1.024 kronor") == ["NUMBER", "kronor"]


def test_normalize_digit_letter_mix_is_a_word():
    # The lookahead stops "3a" from matching as a number; it normalizes
    # as an ordinary word instead.
    assert normalize_line("3a") == ["3a"]


def test_normalize_splits_punctuation():
    assert normalize_line('Vad heter du?') == ["vad", "heter", "du", "?"]
    assert normalize_line('"citat", sa hon') == ['"', "citat", '"', ",", "sa", "hon"]


def test_normalize_preserves_number_token():
    # The literal placeholder must survive re-normalization, otherwise
    # normalizing an already-normalized corpus would corrupt it.
    assert normalize_line("NUMBER") == [NUMBER_TOKEN]
    assert normalize_line("number") == ["number"]


def test_normalize_idempotent():
    lines = [
        "Han har 3 hundar.",
        "NUMBER st, 4,5 kg!",
        "Ett äpple: 2 kronor",
    ]
    for line in lines:
        once = normalize_line(line)
        twice = normalize_line(" ".join(once))
        assert once == twice


def test_normalize_empty_line():
    assert normalize_line("") == []
    assert normalize_line("   ") == []


def test_read_sentences_skips_blank_lines(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("En hund.\n\nEtt hus.\n", encoding="utf-8")
    sentences = list(read_sentences(path))
    assert sentences == [["en", "hund", "."], ["ett", "hus", "."]]


def test_iter_corpus_lines_handles_crlf(tmp_path):
    path = tmp_path / "c.txt"
    path.write_bytes(b"rad ett\r\nrad tv\xc3\xa5\n")
    assert list(iter_corpus_lines(path)) == ["rad ett", "rad två"]


def test_iter_corpus_lines_invalid_utf8(tmp_path):
    path = tmp_path / "c.txt"
    path.write_bytes(b"bra rad\nd\xe5lig rad\n")
    with pytest.raises(DataError) as err:
        list(iter_corpus_lines(path))
    assert "byte offset" in str(err.value)
    # offset of the bad byte: len("bra rad\n") + 1
    assert "9" in str(err.value)


def test_build_vocabulary_orders_by_frequency_then_word():
    corpus = [["b", "a", "b"], ["a", "c", "b"]]
    vocab = build_vocabulary(corpus)
    # b:3, a:2, c:1
    assert vocab.id_of("b") == 0
    assert vocab.id_of("a") == 1
    assert vocab.id_of("c") == 2
    assert vocab.frequency_of("b") == 3
    assert vocab.total_tokens == 6


def test_build_vocabulary_breaks_frequency_ties_alphabetically():
    vocab = build_vocabulary([["d", "c", "c", "d"]])
    assert vocab.id_of("c") == 0
    assert vocab.id_of("d") == 1


def test_filter_by_frequency_is_strict():
    vocab = build_vocabulary([["a"] * 5 + ["b"] * 3 + ["c"] * 3 + ["d"]])
    kept = filter_by_frequency(vocab, 3)
    assert "a" in kept
    assert "b" not in kept and "c" not in kept and "d" not in kept
    # ids are re-densified after filtering
    assert kept.id_of("a") == 0


def test_filter_by_frequency_zero_keeps_all():
    vocab = build_vocabulary([["a", "b"]])
    assert len(filter_by_frequency(vocab, 0)) == 2


def test_filter_by_frequency_negative():
    vocab = build_vocabulary([["a"]])
    with pytest.raises(ConfigurationError):
        filter_by_frequency(vocab, -1)


def test_vocabulary_rejects_duplicates_and_bad_freq():
    with pytest.raises(DataError):
        Vocabulary([("a", 1), ("a", 2)])
    with pytest.raises(DataError):
        Vocabulary([("a", 0)])


def test_vocabulary_roundtrip(tmp_path):
    vocab = build_vocabulary([["en", "hund", "en", "katt"]])
    path = tmp_path / "vocab.tsv"
    save_vocabulary(vocab, path)
    loaded = load_vocabulary(path)
    assert loaded == vocab
    assert [w for w, _, _ in loaded.entries()] == [w for w, _, _ in vocab.entries()]


def test_load_vocabulary_validates_dense_ids(tmp_path):
    path = tmp_path / "vocab.tsv"
    path.write_text("word\tid\tfreq\na\t0\t5\nb\t2\t3\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_vocabulary(path)


def test_load_vocabulary_rejects_malformed_row(tmp_path):
    path = tmp_path / "vocab.tsv"
    path.write_text("word\tid\tfreq\na\t0\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_vocabulary(path)
