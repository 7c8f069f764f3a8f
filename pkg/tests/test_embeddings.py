import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from data.embeddings import (PAD, UNK, EmbeddingLookup, Provenance, Vocabulary, load_word2vec_text,
                             random_embeddings)
from data.errors import EmbeddingFormatError
from diffcore.node import constant
from models.corpus import Sentence


def _vocab():
    return Vocabulary.build([Sentence(tokens=["the", "pizza"])], [Sentence(tokens=["the", "screen"])])


def test_vocabulary_reserves_pad_and_unk_then_first_appearance_order():
    vocab = _vocab()
    assert vocab.itos == [PAD, UNK, "the", "pizza", "screen"]
    assert_array_equal(vocab.encode(["screen", "sushi"]), [4, 1])


def test_random_embeddings_keep_a_zero_padding_row(rng):
    matrix = random_embeddings(_vocab(), 3, rng, bound=0.25)
    assert_array_equal(matrix.table[0], np.zeros(3))
    assert np.abs(matrix.table).max() <= 0.25
    assert matrix.provenance[0] is Provenance.PAD


def test_word2vec_rows_override_random_rows(tmp_path):
    path = tmp_path / "vectors.txt"
    path.write_text("2 3\npizza 1 2 3\nsushi 4 5 6\n", encoding="utf-8")
    matrix = load_word2vec_text(path, _vocab(), dim=3, rng=np.random.default_rng(0))
    assert_allclose(matrix.table[3], [1, 2, 3])
    assert matrix.provenance[3] is Provenance.PRETRAINED
    assert matrix.provenance[4] is Provenance.OOV_RANDOM


def test_oov_rows_do_not_depend_on_file_contents(tmp_path):
    with_vector = tmp_path / "a.txt"
    without = tmp_path / "b.txt"
    with_vector.write_text("pizza 1 2 3\n", encoding="utf-8")
    without.write_text("sushi 1 2 3\n", encoding="utf-8")
    a = load_word2vec_text(with_vector, _vocab(), 3, np.random.default_rng(9))
    b = load_word2vec_text(without, _vocab(), 3, np.random.default_rng(9))
    assert_array_equal(a.table[4], b.table[4])


@pytest.mark.parametrize("content", ["1 4\npizza 1 2 3 4\n", "pizza 1 2\n"])
def test_dimension_mismatch_points_at_the_first_line(tmp_path, content):
    path = tmp_path / "bad.txt"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(EmbeddingFormatError, match="dimension") as info:
        load_word2vec_text(path, _vocab(), dim=3)
    assert info.value.line == 1


@pytest.mark.parametrize("content", ["the 1 2 3\npizza 1 x 3\n", "3 3\nthe 1 2 3\n"])
def test_unreadable_vector_files_are_format_errors(tmp_path, content):
    path = tmp_path / "bad.txt"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(EmbeddingFormatError):
        load_word2vec_text(path, _vocab(), dim=3)


def test_lookup_maps_unknown_words_to_the_unk_row(rng):
    vocab = _vocab()
    table = random_embeddings(vocab, 3, rng).table
    rows = EmbeddingLookup(constant(table), vocab, dropout=0.5)(["the", "croissant"], training=False)
    assert_allclose(rows.value, table[[2, 1]].astype(rows.value.dtype))
