"""Per-word domain discriminator behind gradient reversal, and its selective loss."""
import logging
from typing import Optional, Sequence

import numpy as np

from diffcore import ops
from diffcore.node import DiffNode
from diffcore.params import DISCRIMINATOR, ParamStore
from models.tags import DomainLabel

logger = logging.getLogger(__name__)


class DomainDiscriminator:
    def __init__(self, store: ParamStore, n_in: int, rng: np.random.Generator, bound: float = 0.2):
        self.n_in = n_in
        self.weight = store.uniform("disc.W", (n_in, 2), bound, rng, DISCRIMINATOR)
        self.bias = store.zeros("disc.b", (2,), DISCRIMINATOR)

    def domain_scores(self, features: DiffNode, lam: float) -> DiffNode:
        """Softmax over {source, target}; the feature path sees -lam times the gradient."""
        reversed_features = ops.grad_reverse(features, lam)
        return ops.softmax(ops.affine(reversed_features, self.weight, self.bias))

    __call__ = domain_scores


def sal_loss(scores: Sequence[DiffNode], domains: Sequence[DomainLabel],
             selectors: Optional[Sequence[DiffNode]] = None, selective: bool = True,
             detach: bool = True) -> DiffNode:
    """Mean over sentences of the per-word domain cross-entropy summed within each sentence.

    With ``selective`` every word is weighted by its final-hop aspect attention;
    ``detach`` keeps that weight out of the gradient.
    """
    if not scores:
        raise ValueError("sal_loss needs at least one sentence")
    if selective and selectors is None:
        raise ValueError("selective domain loss needs the aspect attention of every sentence")
    per_sentence = []
    for i, (probs, domain) in enumerate(zip(scores, domains)):
        labels = np.full(probs.shape[0], int(domain), dtype=np.int64)
        weights = None
        if selective:
            weights = selectors[i].value if detach else selectors[i]
        per_sentence.append(ops.nll(probs, labels, weights))
    return ops.scale(ops.add_n(per_sentence), 1.0 / len(per_sentence))
