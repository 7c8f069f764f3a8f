import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional

import numpy as np

from diffcore.errors import GraphError
from diffcore.params import ParamStore

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)


def global_norm(store: ParamStore, names: Iterable[str]) -> float:
    total = 0.0
    for name in names:
        grad = store[name].grad
        if grad is not None:
            total += float(np.sum(np.square(grad, dtype=np.float64)))
    return math.sqrt(total)


def clip_global_norm(store: ParamStore, names: Optional[Iterable[str]] = None, max_norm: float = 40.0) -> float:
    """Rescale gradients so their joint l2 norm is at most ``max_norm``; returns the factor used."""
    names = list(store.names() if names is None else names)
    norm = global_norm(store, names)
    if norm <= max_norm:
        return 1.0
    factor = max_norm / norm
    for name in names:
        grad = store[name].grad
        if grad is not None:
            grad *= factor
    logger.debug("Clipped gradient norm %.3f to %.1f", norm, max_norm)
    return factor


def adam_step(store: ParamStore, state: AdamState, partitions: Optional[Iterable[str]] = None) -> None:
    """Bias-corrected Adam update of the selected partitions, then zero their gradients."""
    names = store.names(partitions)
    for name in names:
        if store[name].grad is None:
            raise GraphError(f"adam_step: parameter {name} has no gradient")
    state.t += 1
    correction1 = 1 - state.beta1 ** state.t
    correction2 = 1 - state.beta2 ** state.t
    for name in names:
        node = store[name]
        grad = node.grad
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m = np.zeros_like(node.value)
            v = np.zeros_like(node.value)
        m = state.beta1 * m + (1 - state.beta1) * grad
        v = state.beta2 * v + (1 - state.beta2) * grad * grad
        state.m[name], state.v[name] = m, v
        update = state.lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)
        node.value = (node.value - update).astype(node.value.dtype)
        node.grad[...] = 0
