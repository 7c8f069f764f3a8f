import contextlib
import itertools
import logging
from typing import Callable, Iterator, List, Optional, Sequence

import numpy as np

from diffcore.errors import GraphError, ShapeError

logger = logging.getLogger(__name__)

_PRECISIONS = {"float32": np.float32, "float64": np.float64}
_dtype = np.float32
_node_ids = itertools.count()


def set_precision(name: str) -> None:
    """Select the float width used for new constants and parameters."""
    global _dtype
    if name not in _PRECISIONS:
        raise ValueError(f"unknown precision {name!r}, expected one of {sorted(_PRECISIONS)}")
    _dtype = _PRECISIONS[name]


def get_dtype():
    return _dtype


@contextlib.contextmanager
def precision(name: str) -> Iterator[None]:
    previous = "float64" if _dtype is np.float64 else "float32"
    set_precision(name)
    try:
        yield
    finally:
        set_precision(previous)


class DiffNode:
    """A value in the define-by-run graph.

    ``parents`` and ``backward`` record the producing operation; the closure
    receives the upstream gradient and pushes contributions into the parents
    via ``accumulate``. Ids increase with creation so sorting by id is a
    topological order.
    """

    __slots__ = ("id", "value", "grad", "op", "parents", "requires_grad", "name", "_backward")

    def __init__(
        self,
        value: np.ndarray,
        op: str = "leaf",
        parents: Sequence["DiffNode"] = (),
        backward: Optional[Callable[[np.ndarray], None]] = None,
        requires_grad: bool = False,
        name: Optional[str] = None,
    ):
        self.id = next(_node_ids)
        self.value = value
        self.grad: Optional[np.ndarray] = None
        self.op = op
        self.parents = tuple(parents)
        self.requires_grad = requires_grad
        self.name = name
        self._backward = backward

    @property
    def shape(self):
        return self.value.shape

    @property
    def ndim(self) -> int:
        return self.value.ndim

    def accumulate(self, grad: np.ndarray) -> None:
        if grad.shape != self.value.shape:
            raise ShapeError(f"accumulate[{self.op}]", self.value.shape, grad.shape)
        if self.grad is None:
            self.grad = np.zeros_like(self.value)
        self.grad += grad

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        label = self.name or self.op
        return f"DiffNode(id={self.id}, {label}, shape={self.shape})"


def constant(value, name: Optional[str] = None) -> DiffNode:
    return DiffNode(np.asarray(value, dtype=_dtype), op="constant", name=name)


def variable(value, name: Optional[str] = None) -> DiffNode:
    """A leaf that collects gradients (parameters and test inputs)."""
    return DiffNode(np.array(value, dtype=_dtype), op="leaf", requires_grad=True, name=name)


def _reachable(root: DiffNode, only_grad: bool) -> List[DiffNode]:
    seen = {root.id: root}
    stack = [root]
    while stack:
        node = stack.pop()
        for parent in node.parents:
            if only_grad and not parent.requires_grad:
                continue
            if parent.id not in seen:
                seen[parent.id] = parent
                stack.append(parent)
    return list(seen.values())


def backward(root: DiffNode) -> None:
    """Populate ``grad`` on every requires_grad node reachable from a scalar root."""
    if root.value.ndim != 0:
        raise GraphError(f"backward needs a scalar root, got shape {root.value.shape}")
    order = sorted(_reachable(root, only_grad=True), key=lambda node: node.id, reverse=True)
    root.grad = np.ones_like(root.value)
    for node in order:
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad)


def find_non_finite(root: DiffNode) -> Optional[DiffNode]:
    """Return the earliest-created node in the graph whose value is not finite."""
    for node in sorted(_reachable(root, only_grad=False), key=lambda node: node.id):
        if not np.all(np.isfinite(node.value)):
            return node
    return None
