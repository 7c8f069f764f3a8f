import logging

import numpy as np

from diffcore import ops
from diffcore.node import DiffNode
from diffcore.params import FEATURE, ParamStore

logger = logging.getLogger(__name__)


class BiLstm:
    """Forward and backward LSTM over one sentence; row t is [fwd_t : bwd_t]."""

    def __init__(self, store: ParamStore, prefix: str, n_in: int, per_direction: int,
                 rng: np.random.Generator, bound: float = 0.2):
        self.prefix = prefix
        self.n_in = n_in
        self.per_direction = per_direction
        self.directions = {}
        for direction in ("fwd", "bwd"):
            self.directions[direction] = (
                store.uniform(f"{prefix}.{direction}.W", (n_in, 4 * per_direction), bound, rng, FEATURE),
                store.uniform(f"{prefix}.{direction}.U", (per_direction, 4 * per_direction), bound, rng, FEATURE),
                store.zeros(f"{prefix}.{direction}.b", (4 * per_direction,), FEATURE),
            )

    @property
    def out_dim(self) -> int:
        return 2 * self.per_direction

    def __call__(self, inputs: DiffNode) -> DiffNode:
        forward = ops.lstm_scan(inputs, *self.directions["fwd"])
        backward = ops.lstm_scan(inputs, *self.directions["bwd"], reverse=True)
        return ops.concat([forward, backward])


def bilstm_forward(layer: BiLstm, inputs: DiffNode) -> DiffNode:
    return layer(inputs)
