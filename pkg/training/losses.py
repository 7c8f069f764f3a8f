"""Task losses; each is summed over words and averaged over sentences."""
from typing import Sequence

import numpy as np

from diffcore import ops
from diffcore.node import DiffNode
from models.corpus import Sentence
from models.tags import OpinionLabel
from training.errors import MissingLabelsError


def _mean(losses: Sequence[DiffNode]) -> DiffNode:
    return ops.scale(ops.add_n(list(losses)), 1.0 / len(losses))


def main_loss(outputs: Sequence, sentences: Sequence[Sentence]) -> DiffNode:
    """Boundary plus unified cross-entropy over labeled (source) sentences."""
    if not sentences:
        raise ValueError("main_loss needs at least one sentence")
    losses = []
    for output, sentence in zip(outputs, sentences):
        if not sentence.labeled:
            raise MissingLabelsError(f"sentence {' '.join(sentence.tokens[:8])!r} has no tags for the main loss")
        unified = np.array([tag.code for tag in sentence.unified_tags], dtype=np.int64)
        boundary = np.array([tag.boundary.code for tag in sentence.unified_tags], dtype=np.int64)
        losses.append(ops.add(ops.nll(output.boundary, boundary), ops.nll(output.unified, unified)))
    return _mean(losses)


def opinion_labels(sentence: Sentence) -> np.ndarray:
    """Lexicon labels, or all NOT_OPINION when the sentence was never labeled."""
    if sentence.opinion_labels:
        return np.array([int(label) for label in sentence.opinion_labels], dtype=np.int64)
    return np.full(len(sentence), int(OpinionLabel.NOT_OPINION), dtype=np.int64)


def opinion_loss(outputs: Sequence, sentences: Sequence[Sentence]) -> DiffNode:
    if not sentences:
        raise ValueError("opinion_loss needs at least one sentence")
    return _mean([ops.nll(output.opinion, opinion_labels(sentence)) for output, sentence in zip(outputs, sentences)])
