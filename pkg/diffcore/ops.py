"""Primitive operations with analytic backward rules.

Each function computes its forward value eagerly and, when any input needs a
gradient, attaches a closure that maps the upstream gradient onto the inputs.
Sequences are carried as (T, d) matrices; row i is the vector for word i.
"""
import logging
from typing import Optional, Sequence, Union

import numpy as np

from diffcore.errors import ShapeError
from diffcore.node import DiffNode

logger = logging.getLogger(__name__)

Weights = Union[None, np.ndarray, DiffNode]

# keeps log() and nll() finite when float32 probabilities underflow
_TINY = 1e-30


def _make(value, op, parents, backward) -> DiffNode:
    needs = any(p.requires_grad for p in parents)
    return DiffNode(value, op=op, parents=parents, backward=backward if needs else None, requires_grad=needs)


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_shape(op: str, a: DiffNode, b: DiffNode):
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError as exc:
        raise ShapeError(op, a.shape, b.shape) from exc


def add(a: DiffNode, b: DiffNode) -> DiffNode:
    _broadcast_shape("add", a, b)

    def _backward(g):
        if a.requires_grad:
            a.accumulate(_unbroadcast(g, a.shape))
        if b.requires_grad:
            b.accumulate(_unbroadcast(g, b.shape))

    return _make(a.value + b.value, "add", (a, b), _backward)


def add_n(nodes: Sequence[DiffNode]) -> DiffNode:
    """Sum of same-shaped nodes."""
    first = nodes[0]
    for other in nodes[1:]:
        if other.shape != first.shape:
            raise ShapeError("add_n", first.shape, other.shape)
    total = first.value.copy()
    for other in nodes[1:]:
        total = total + other.value

    def _backward(g):
        for node in nodes:
            if node.requires_grad:
                node.accumulate(g.copy())

    return _make(total, "add_n", tuple(nodes), _backward)


def mul(a: DiffNode, b: DiffNode) -> DiffNode:
    _broadcast_shape("mul", a, b)

    def _backward(g):
        if a.requires_grad:
            a.accumulate(_unbroadcast(g * b.value, a.shape))
        if b.requires_grad:
            b.accumulate(_unbroadcast(g * a.value, b.shape))

    return _make(a.value * b.value, "mul", (a, b), _backward)


def scale(x: DiffNode, factor: float) -> DiffNode:
    return _make(x.value * factor, "scale", (x,), lambda g: x.accumulate(g * factor))


def matmul(a: DiffNode, b: DiffNode) -> DiffNode:
    """Matrix/vector product with numpy semantics for 1-D and 2-D operands."""
    if a.ndim not in (1, 2) or b.ndim not in (1, 2) or a.shape[-1] != b.shape[0]:
        raise ShapeError("matmul", a.shape, b.shape)
    out = np.matmul(a.value, b.value)

    def _backward(g):
        a2 = a.value if a.ndim == 2 else a.value[None, :]
        b2 = b.value if b.ndim == 2 else b.value[:, None]
        g2 = np.reshape(g, (a2.shape[0], b2.shape[1]))
        if a.requires_grad:
            a.accumulate(np.reshape(g2 @ b2.T, a.shape))
        if b.requires_grad:
            b.accumulate(np.reshape(a2.T @ g2, b.shape))

    return _make(out, "matmul", (a, b), _backward)


def affine(x: DiffNode, weight: DiffNode, bias: DiffNode) -> DiffNode:
    return add(matmul(x, weight), bias)


def concat(nodes: Sequence[DiffNode]) -> DiffNode:
    """Concatenate along the last axis."""
    lead = nodes[0].shape[:-1]
    for node in nodes[1:]:
        if node.shape[:-1] != lead:
            raise ShapeError("concat", nodes[0].shape, node.shape)
    out = np.concatenate([node.value for node in nodes], axis=-1)
    bounds = np.cumsum([0] + [node.shape[-1] for node in nodes])

    def _backward(g):
        for node, lo, hi in zip(nodes, bounds[:-1], bounds[1:]):
            if node.requires_grad:
                node.accumulate(g[..., lo:hi])

    return _make(out, "concat", tuple(nodes), _backward)


def repeat_rows(v: DiffNode, count: int) -> DiffNode:
    """Stack a vector ``count`` times into a (count, d) matrix."""
    if v.ndim != 1:
        raise ShapeError("repeat_rows", v.shape, (count,))
    out = np.broadcast_to(v.value, (count, v.shape[0])).copy()
    return _make(out, "repeat_rows", (v,), lambda g: v.accumulate(g.sum(axis=0)))


def gather_rows(table: DiffNode, ids: np.ndarray) -> DiffNode:
    ids = np.asarray(ids, dtype=np.int64)

    def _backward(g):
        full = np.zeros_like(table.value)
        np.add.at(full, ids, g)
        table.accumulate(full)

    return _make(table.value[ids], "gather_rows", (table,), _backward)


def relu(x: DiffNode) -> DiffNode:
    mask = x.value > 0
    return _make(np.where(mask, x.value, 0).astype(x.value.dtype), "relu", (x,),
                 lambda g: x.accumulate(g * mask))


def tanh(x: DiffNode) -> DiffNode:
    y = np.tanh(x.value)
    return _make(y, "tanh", (x,), lambda g: x.accumulate(g * (1 - y * y)))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1 + np.tanh(0.5 * z))


def sigmoid(x: DiffNode) -> DiffNode:
    y = _sigmoid(x.value)
    return _make(y, "sigmoid", (x,), lambda g: x.accumulate(g * y * (1 - y)))


def softmax(x: DiffNode, axis: int = -1) -> DiffNode:
    shifted = x.value - x.value.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)

    def _backward(g):
        x.accumulate(y * (g - (g * y).sum(axis=axis, keepdims=True)))

    return _make(y, "softmax", (x,), _backward)


def log(x: DiffNode) -> DiffNode:
    safe = np.maximum(x.value, _TINY)
    return _make(np.log(safe), "log", (x,), lambda g: x.accumulate(g / safe))


def bilinear(m: DiffNode, tensor: DiffNode, h: DiffNode, transpose: bool = False) -> DiffNode:
    """r[t, k] = m^T G_k h_t for every slice k of a (K, d, d) tensor.

    With ``transpose`` the slices are read as G_k^T, which lets one storage
    serve both directions of a tied cross interaction.
    """
    squeeze = h.ndim == 1
    hv = h.value[None, :] if squeeze else h.value
    if (tensor.ndim != 3 or tensor.shape[1] != tensor.shape[2] or m.ndim != 1
            or m.shape[0] != tensor.shape[1] or hv.shape[-1] != tensor.shape[2]):
        raise ShapeError("bilinear", m.shape + tensor.shape, h.shape)
    slices = tensor.value.transpose(0, 2, 1) if transpose else tensor.value
    projected = np.tensordot(m.value, slices, axes=(0, 1))
    out = hv @ projected.T

    def _backward(g):
        g2 = g[None, :] if squeeze else g
        g_projected = g2.T @ hv
        if m.requires_grad:
            m.accumulate(np.tensordot(slices, g_projected, axes=([0, 2], [0, 1])))
        if tensor.requires_grad:
            g_slices = m.value[None, :, None] * g_projected[:, None, :]
            tensor.accumulate(g_slices.transpose(0, 2, 1) if transpose else g_slices)
        if h.requires_grad:
            gh = g2 @ projected
            h.accumulate(gh[0] if squeeze else gh)

    return _make(out[0] if squeeze else out, "bilinear", (m, tensor, h), _backward)


def dropout(x: DiffNode, rate: float, training: bool, rng: Optional[np.random.Generator]) -> DiffNode:
    """Inverted dropout; the identity outside training or at rate 0."""
    if not training or rate <= 0:
        return x
    keep = 1.0 - rate
    mask = ((rng.random(x.shape) < keep) / keep).astype(x.value.dtype)
    return _make(x.value * mask, "dropout", (x,), lambda g: x.accumulate(g * mask))


def grad_reverse(x: DiffNode, lam: float) -> DiffNode:
    """Identity forward; multiplies the gradient by -lam on the way back."""
    if lam < 0:
        raise ValueError(f"grad_reverse needs lam >= 0, got {lam}")
    return _make(x.value, "grad_reverse", (x,), lambda g: x.accumulate(-lam * g))


def nll(probs: DiffNode, labels, weights: Weights = None) -> DiffNode:
    """Sum over rows of -w_t * log probs[t, labels[t]] as a scalar node.

    ``weights`` may be a constant array (no gradient) or a node, in which
    case it receives the per-row losses as its gradient.
    """
    squeeze = probs.ndim == 1
    p = probs.value[None, :] if squeeze else probs.value
    labels = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    if labels.shape[0] != p.shape[0]:
        raise ShapeError("nll", probs.shape, labels.shape)
    rows = np.arange(p.shape[0])
    picked = np.maximum(p[rows, labels], _TINY)
    losses = -np.log(picked)
    if weights is None:
        w = np.ones_like(losses)
    elif isinstance(weights, DiffNode):
        w = weights.value
    else:
        w = np.asarray(weights, dtype=p.dtype)
    if w.shape != losses.shape:
        raise ShapeError("nll.weights", losses.shape, w.shape)
    total = np.asarray((w * losses).sum(), dtype=p.dtype)
    parents = (probs, weights) if isinstance(weights, DiffNode) else (probs,)

    def _backward(g):
        if probs.requires_grad:
            gp = np.zeros_like(p)
            gp[rows, labels] = -g * w / picked
            probs.accumulate(gp[0] if squeeze else gp)
        if isinstance(weights, DiffNode) and weights.requires_grad:
            weights.accumulate((g * losses).astype(weights.value.dtype))

    return _make(total, "nll", parents, _backward)


def lstm_scan(x: DiffNode, w: DiffNode, u: DiffNode, b: DiffNode, reverse: bool = False) -> DiffNode:
    """One LSTM direction over a (T, n_in) sequence with zero initial state.

    Weights are (n_in, 4h), (h, 4h), (4h,) in gate order input, forget,
    output, candidate. Row t of the output is the hidden state at position t;
    with ``reverse`` the recurrence runs from the last position to the first.
    """
    steps, n_in = x.shape
    hidden = u.shape[0]
    if w.shape != (n_in, 4 * hidden) or u.shape != (hidden, 4 * hidden) or b.shape != (4 * hidden,):
        raise ShapeError("lstm_scan", x.shape, w.shape)
    dtype = x.value.dtype
    order = range(steps - 1, -1, -1) if reverse else range(steps)
    xw = x.value @ w.value + b.value
    hs = np.zeros((steps, hidden), dtype=dtype)
    cs = np.zeros((steps, hidden), dtype=dtype)
    gates = np.zeros((steps, 4 * hidden), dtype=dtype)
    h_prev = np.zeros(hidden, dtype=dtype)
    c_prev = np.zeros(hidden, dtype=dtype)
    prev_of = {}
    for t in order:
        z = xw[t] + h_prev @ u.value
        i_g = _sigmoid(z[:hidden])
        f_g = _sigmoid(z[hidden:2 * hidden])
        o_g = _sigmoid(z[2 * hidden:3 * hidden])
        c_hat = np.tanh(z[3 * hidden:])
        c = f_g * c_prev + i_g * c_hat
        h = o_g * np.tanh(c)
        gates[t] = np.concatenate([i_g, f_g, o_g, c_hat])
        prev_of[t] = (h_prev, c_prev)
        hs[t], cs[t] = h, c
        h_prev, c_prev = h, c

    def _backward(g):
        gw = np.zeros_like(w.value)
        gu = np.zeros_like(u.value)
        gb = np.zeros_like(b.value)
        gx = np.zeros_like(x.value)
        dh_next = np.zeros(hidden, dtype=dtype)
        dc_next = np.zeros(hidden, dtype=dtype)
        for t in reversed(list(order)):
            h_before, c_before = prev_of[t]
            i_g = gates[t, :hidden]
            f_g = gates[t, hidden:2 * hidden]
            o_g = gates[t, 2 * hidden:3 * hidden]
            c_hat = gates[t, 3 * hidden:]
            tanh_c = np.tanh(cs[t])
            dh = g[t] + dh_next
            do = dh * tanh_c
            dc = dh * o_g * (1 - tanh_c * tanh_c) + dc_next
            dz = np.concatenate([
                dc * c_hat * i_g * (1 - i_g),
                dc * c_before * f_g * (1 - f_g),
                do * o_g * (1 - o_g),
                dc * i_g * (1 - c_hat * c_hat),
            ])
            gw += np.outer(x.value[t], dz)
            gu += np.outer(h_before, dz)
            gb += dz
            gx[t] = w.value @ dz
            dh_next = u.value @ dz
            dc_next = dc * f_g
        if x.requires_grad:
            x.accumulate(gx)
        if w.requires_grad:
            w.accumulate(gw)
        if u.requires_grad:
            u.accumulate(gu)
        if b.requires_grad:
            b.accumulate(gb)

    return _make(hs, "lstm_scan", (x, w, u, b), _backward)
