"""Central-difference verification of analytic gradients."""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Union

import numpy as np

from diffcore.node import DiffNode, backward
from diffcore.params import ParamStore

logger = logging.getLogger(__name__)

LossFn = Callable[[], DiffNode]


@dataclass
class GradCheckReport:
    max_error: float = 0.0
    worst: Optional[str] = None
    per_param: Dict[str, float] = field(default_factory=dict)
    checked: int = 0


def _nodes(store: Union[ParamStore, Mapping[str, DiffNode]]) -> Dict[str, DiffNode]:
    if isinstance(store, ParamStore):
        return dict(store.entries)
    return dict(store)


def relative_error(analytic: float, numeric: float, atol: float = 0.0) -> float:
    diff = abs(analytic - numeric)
    if diff <= atol:
        return 0.0
    return diff / max(1e-8, abs(analytic) + abs(numeric))


def check_gradients(
    loss_fn: LossFn,
    store: Union[ParamStore, Mapping[str, DiffNode]],
    eps: float = 1e-5,
    samples: int = 6,
    scales: Optional[Mapping[str, float]] = None,
    seed: int = 0,
    atol: float = 0.0,
) -> GradCheckReport:
    """Compare backward() against (f(x+eps) - f(x-eps)) / 2eps on sampled coordinates.

    ``scales`` maps a node name to the factor the analytic gradient should
    carry relative to the numeric one (-lam for nodes behind a gradient
    reversal). ``loss_fn`` must be deterministic and rebuild the graph on
    every call.
    """
    nodes = _nodes(store)
    scales = scales or {}
    rng = np.random.default_rng(seed)

    for node in nodes.values():
        node.zero_grad()
    root = loss_fn()
    backward(root)
    analytic = {name: (np.zeros_like(node.value) if node.grad is None else node.grad.copy())
                for name, node in nodes.items()}

    report = GradCheckReport()
    for name, node in nodes.items():
        size = node.value.size
        picks = np.arange(size) if size <= samples else rng.choice(size, size=samples, replace=False)
        factor = scales.get(name, 1.0)
        worst = 0.0
        for flat in picks:
            index = np.unravel_index(int(flat), node.value.shape)
            original = node.value[index]
            node.value[index] = original + eps
            plus = float(loss_fn().value)
            node.value[index] = original - eps
            minus = float(loss_fn().value)
            node.value[index] = original
            numeric = factor * (plus - minus) / (2 * eps)
            worst = max(worst, relative_error(float(analytic[name][index]), numeric, atol))
            report.checked += 1
        report.per_param[name] = worst
        if worst >= report.max_error:
            report.max_error, report.worst = worst, name
    for node in nodes.values():
        node.zero_grad()
    logger.info("Gradient check: max relative error %.3e at %s over %d coordinates",
                report.max_error, report.worst, report.checked)
    return report


def finite_difference_check(loss_fn: LossFn, store: Union[ParamStore, Mapping[str, DiffNode]],
                            eps: float = 1e-5, **kwargs) -> float:
    return check_gradients(loss_fn, store, eps=eps, **kwargs).max_error
