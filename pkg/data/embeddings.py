import logging
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from gensim.models import KeyedVectors

from data.errors import EmbeddingFormatError
from diffcore import ops
from diffcore.node import DiffNode
from models.corpus import Sentence

logger = logging.getLogger(__name__)

PAD = "<pad>"
UNK = "<unk>"


class Provenance(str, Enum):
    PRETRAINED = "pretrained"
    OOV_RANDOM = "oov_random"
    PAD = "pad"


class Vocabulary:
    """Token to row index; row 0 is padding, row 1 the shared unknown-word row."""

    def __init__(self, tokens: Iterable[str] = ()):
        self.itos: List[str] = [PAD, UNK]
        self.stoi: Dict[str, int] = {PAD: 0, UNK: 1}
        for token in tokens:
            self.add(token)

    @classmethod
    def build(cls, *corpora: Sequence[Sentence]) -> "Vocabulary":
        """First-appearance order over the given corpora (train source, train target, validation)."""
        vocab = cls()
        for corpus in corpora:
            for sentence in corpus:
                for token in sentence.tokens:
                    vocab.add(token)
        logger.info("Vocabulary built with %d entries", len(vocab))
        return vocab

    def add(self, token: str) -> int:
        index = self.stoi.get(token)
        if index is None:
            index = len(self.itos)
            self.stoi[token] = index
            self.itos.append(token)
        return index

    def encode(self, tokens: Sequence[str]) -> np.ndarray:
        unk = self.stoi[UNK]
        return np.array([self.stoi.get(token, unk) for token in tokens], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.itos)

    def __contains__(self, token: str) -> bool:
        return token in self.stoi


@dataclass
class EmbeddingMatrix:
    table: np.ndarray
    provenance: List[Provenance]

    @property
    def dim(self) -> int:
        return self.table.shape[1]


def random_embeddings(vocab: Vocabulary, dim: int, rng: np.random.Generator, bound: float = 0.25) -> EmbeddingMatrix:
    """Every row drawn from U(-bound, bound) except the zero padding row."""
    table = rng.uniform(-bound, bound, size=(len(vocab), dim))
    table[0] = 0.0
    provenance = [Provenance.PAD] + [Provenance.OOV_RANDOM] * (len(vocab) - 1)
    return EmbeddingMatrix(table=table, provenance=provenance)


def _has_header(path: Path) -> bool:
    with path.open(encoding="utf-8") as fh:
        fields = fh.readline().split()
    return len(fields) == 2 and all(field.isdigit() for field in fields)


def _failing_line(exc: Exception, header: bool) -> int:
    """File line of a gensim read error; gensim counts vector rows from 0."""
    match = re.search(r"line (\d+)", str(exc))
    if match is None:
        return 0
    return int(match.group(1)) + (2 if header else 1)


def load_word2vec_text(path, vocab: Vocabulary, dim: int = 100, rng: Optional[np.random.Generator] = None,
                       bound: float = 0.25) -> EmbeddingMatrix:
    """Fill vocabulary rows from a word2vec text file; the rest stay OOV-random.

    The OOV draw covers the whole table before the file is read, so the
    random rows depend only on the seed and the vocabulary size. Files with
    and without the ``count dim`` header line are accepted.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    matrix = random_embeddings(vocab, dim, rng, bound)
    path = Path(path)
    header = _has_header(path)
    try:
        vectors = KeyedVectors.load_word2vec_format(str(path), binary=False, no_header=not header,
                                                    datatype=np.float64)
    except (ValueError, EOFError) as exc:
        raise EmbeddingFormatError(path, _failing_line(exc, header), str(exc)) from exc
    if vectors.vector_size != dim:
        raise EmbeddingFormatError(path, 1, f"file dimension {vectors.vector_size} != configured {dim}")

    found = 0
    for word, index in vocab.stoi.items():
        if index < 2 or word not in vectors.key_to_index:
            continue
        matrix.table[index] = vectors[word]
        matrix.provenance[index] = Provenance.PRETRAINED
        found += 1
    logger.info("Pretrained vectors found for %d of %d vocabulary entries", found, len(vocab) - 2)
    return matrix


class EmbeddingLookup:
    """Maps a token sequence to a (T, dim) node, with dropout in training mode."""

    def __init__(self, table: DiffNode, vocab: Vocabulary, dropout: float = 0.5):
        self.table = table
        self.vocab = vocab
        self.dropout = dropout

    def __call__(self, tokens: Sequence[str], training: bool = False,
                 rng: Optional[np.random.Generator] = None) -> DiffNode:
        rows = ops.gather_rows(self.table, self.vocab.encode(tokens))
        return ops.dropout(rows, self.dropout, training, rng)


def lookup(embeddings: EmbeddingLookup, sentence: Sentence, training: bool = False,
           rng: Optional[np.random.Generator] = None) -> DiffNode:
    return embeddings(sentence.tokens, training, rng)
