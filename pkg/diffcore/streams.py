from dataclasses import dataclass

import numpy as np


@dataclass
class RandomStreams:
    """One generator per concern so toggling one (e.g. dropout) never shifts another."""

    init: np.random.Generator
    dropout: np.random.Generator
    batching: np.random.Generator
    oov: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RandomStreams":
        init, drop, batching, oov = np.random.SeedSequence(seed).spawn(4)
        return cls(
            init=np.random.default_rng(init),
            dropout=np.random.default_rng(drop),
            batching=np.random.default_rng(batching),
            oov=np.random.default_rng(oov),
        )
