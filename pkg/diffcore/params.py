import logging
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np

from diffcore.errors import GraphError
from diffcore.node import DiffNode, get_dtype

logger = logging.getLogger(__name__)

FEATURE = "feature"
WORD_PREDICTOR = "word_predictor"
DISCRIMINATOR = "discriminator"
PARTITIONS = (FEATURE, WORD_PREDICTOR, DISCRIMINATOR)


class ParamStore:
    """Named trainable nodes, each tagged with one optimization partition.

    ``buffers`` hold non-trainable arrays (frozen embeddings) that still
    belong in a checkpoint.
    """

    def __init__(self):
        self.entries: Dict[str, DiffNode] = {}
        self.partition: Dict[str, str] = {}
        self.buffers: Dict[str, DiffNode] = {}

    def add(self, name: str, value: np.ndarray, partition: str) -> DiffNode:
        if partition not in PARTITIONS:
            raise GraphError(f"unknown partition {partition!r} for {name}")
        if name in self.entries or name in self.buffers:
            raise GraphError(f"parameter {name} registered twice")
        node = DiffNode(np.array(value, dtype=get_dtype()), requires_grad=True, name=name)
        self.entries[name] = node
        self.partition[name] = partition
        return node

    def uniform(self, name: str, shape: Tuple[int, ...], bound: float, rng: np.random.Generator,
                partition: str) -> DiffNode:
        return self.add(name, rng.uniform(-bound, bound, size=shape), partition)

    def zeros(self, name: str, shape: Tuple[int, ...], partition: str) -> DiffNode:
        return self.add(name, np.zeros(shape), partition)

    def add_buffer(self, name: str, value: np.ndarray) -> DiffNode:
        if name in self.entries or name in self.buffers:
            raise GraphError(f"buffer {name} registered twice")
        node = DiffNode(np.array(value, dtype=get_dtype()), op="buffer", name=name)
        self.buffers[name] = node
        return node

    def __getitem__(self, name: str) -> DiffNode:
        return self.entries[name]

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def items(self) -> Iterator[Tuple[str, DiffNode]]:
        return iter(self.entries.items())

    def names(self, partitions: Optional[Iterable[str]] = None) -> List[str]:
        if partitions is None:
            return list(self.entries)
        wanted = set(partitions)
        return [name for name in self.entries if self.partition[name] in wanted]

    def zero_grad(self) -> None:
        for node in self.entries.values():
            node.zero_grad()

    def snapshot(self, partitions: Optional[Iterable[str]] = None) -> Dict[str, np.ndarray]:
        return {name: self.entries[name].value.copy() for name in self.names(partitions)}

    def restore(self, snapshot: Dict[str, np.ndarray]) -> None:
        for name, value in snapshot.items():
            self.entries[name].value = value.copy()
