import logging
from dataclasses import dataclass
from typing import Generic, Iterator, List, Sequence, Tuple, TypeVar

import numpy as np

from data.errors import CorpusError
from models.corpus import Sentence, TransferPair

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass
class Batch:
    source: List[Sentence]
    target: List[Sentence]

    def __len__(self) -> int:
        return len(self.source) + len(self.target)


class _CyclicStream(Generic[T]):
    """Endless shuffled passes over a corpus; reshuffles at every wrap."""

    def __init__(self, items: Sequence[T], rng: np.random.Generator):
        self.items = list(items)
        self.rng = rng
        self.order: List[int] = []
        self.cursor = 0

    def take(self, count: int) -> List[T]:
        out = []
        while len(out) < count:
            if self.cursor >= len(self.order):
                self.order = list(self.rng.permutation(len(self.items)))
                self.cursor = 0
            out.append(self.items[self.order[self.cursor]])
            self.cursor += 1
        return out


class MixedBatcher:
    """Half-source, half-target batches; an epoch is one pass over the larger corpus.

    The two streams persist across epochs, so sentences left over when an
    epoch ends open the next one.
    """

    def __init__(self, source: Sequence[Sentence], target: Sequence[Sentence], batch_size: int,
                 rng: np.random.Generator):
        if not source or not target:
            raise CorpusError("mixed batching needs non-empty source and target corpora")
        self.half = batch_size // 2
        source_rng, target_rng = rng.spawn(2)
        self.source = _CyclicStream(source, source_rng)
        self.target = _CyclicStream(target, target_rng)
        self.batches_per_epoch = max(1, max(len(source), len(target)) // self.half)

    def epoch(self) -> Iterator[Batch]:
        for _ in range(self.batches_per_epoch):
            yield Batch(source=self.source.take(self.half), target=self.target.take(self.half))


def mixed_batches(pair: TransferPair, batch_size: int = 64, seed: int = 0) -> Iterator[Batch]:
    batcher = MixedBatcher(pair.source_train, pair.target_train, batch_size, np.random.default_rng(seed))
    return batcher.epoch()


def holdout_split(sentences: Sequence[Sentence], fraction: float = 0.1,
                  seed: int = 0) -> Tuple[List[Sentence], List[Sentence]]:
    """Deterministic shuffled split into (train, held-out)."""
    count = len(sentences)
    held = int(round(fraction * count))
    if fraction > 0 and count >= 2:
        held = min(max(held, 1), count - 1)
    order = np.random.default_rng(seed).permutation(count)
    heldout_ids = set(order[:held].tolist())
    train = [s for i, s in enumerate(sentences) if i not in heldout_ids]
    heldout = [s for i, s in enumerate(sentences) if i in heldout_ids]
    return train, heldout
