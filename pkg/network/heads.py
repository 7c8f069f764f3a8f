import numpy as np

from diffcore import ops
from diffcore.node import DiffNode
from diffcore.params import WORD_PREDICTOR, ParamStore


class SoftmaxHead:
    """Per-word affine layer followed by a softmax over the label set."""

    def __init__(self, store: ParamStore, name: str, n_in: int, n_out: int, rng: np.random.Generator,
                 bound: float = 0.2, partition: str = WORD_PREDICTOR):
        self.weight = store.uniform(f"{name}.W", (n_in, n_out), bound, rng, partition)
        self.bias = store.zeros(f"{name}.b", (n_out,), partition)

    def __call__(self, features: DiffNode) -> DiffNode:
        return ops.softmax(ops.affine(features, self.weight, self.bias))
