"""Global-local memory interaction and the multi-hop dual memory.

Two sentence-independent memories, one for aspect evidence and one for
opinion evidence, are fused into every word state and scored against it
through K bilinear slices. Each hop attends over the words with the
resulting correlation vectors and adds the attended word states to the
memories.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from diffcore import ops
from diffcore.node import DiffNode, constant, get_dtype
from diffcore.params import FEATURE, ParamStore
from models.reports import AttentionDump

logger = logging.getLogger(__name__)

Transform = Callable[[DiffNode], DiffNode]


@dataclass
class ResidualFusion:
    """h~ = h + relu([h : m] W + b) with W of shape (2d, d)."""

    weight: DiffNode
    bias: DiffNode

    def __call__(self, hidden: DiffNode, memory: DiffNode) -> DiffNode:
        steps = hidden.shape[0]
        joined = ops.concat([hidden, ops.repeat_rows(memory, steps)])
        return ops.add(hidden, ops.relu(ops.affine(joined, self.weight, self.bias)))


def glmi(hidden: DiffNode, memory: DiffNode, fusion: ResidualFusion, tensor: DiffNode,
         transpose: bool = False) -> DiffNode:
    """(T, K) correlations r[t, k] = m^T G_k h~_t of each word with one memory."""
    return ops.bilinear(memory, tensor, fusion(hidden, memory), transpose=transpose)


class DualMemory:
    """Parameters shared by every hop and by both domains."""

    def __init__(self, store: ParamStore, dim: int, slices: int, rng: np.random.Generator,
                 bound: float = 0.2, learned_init: bool = True, prefix: str = "dmi"):
        self.dim = dim
        self.slices = slices
        self.fusion_a = ResidualFusion(
            store.uniform(f"{prefix}.theta_a.W", (2 * dim, dim), bound, rng, FEATURE),
            store.zeros(f"{prefix}.theta_a.b", (dim,), FEATURE),
        )
        self.fusion_o = ResidualFusion(
            store.uniform(f"{prefix}.theta_o.W", (2 * dim, dim), bound, rng, FEATURE),
            store.zeros(f"{prefix}.theta_o.b", (dim,), FEATURE),
        )
        self.g_a = store.uniform(f"{prefix}.G_a", (slices, dim, dim), bound, rng, FEATURE)
        self.g_o = store.uniform(f"{prefix}.G_o", (slices, dim, dim), bound, rng, FEATURE)
        # one storage; the opinion side reads it slice-transposed
        self.g_ao = store.uniform(f"{prefix}.G_ao", (slices, dim, dim), bound, rng, FEATURE)
        self.w_a = store.uniform(f"{prefix}.w_a", (2 * slices,), bound, rng, FEATURE)
        self.w_o = store.uniform(f"{prefix}.w_o", (2 * slices,), bound, rng, FEATURE)
        if learned_init:
            self.m_a = store.uniform(f"{prefix}.m_a", (dim,), bound, rng, FEATURE)
            self.m_o = store.uniform(f"{prefix}.m_o", (dim,), bound, rng, FEATURE)
        else:
            self.m_a = constant(np.zeros(dim, dtype=get_dtype()), name=f"{prefix}.m_a")
            self.m_o = constant(np.zeros(dim, dtype=get_dtype()), name=f"{prefix}.m_o")

    def hop(self, hidden: DiffNode, m_a: DiffNode, m_o: DiffNode,
            dropout: Optional[Transform] = None) -> "DmiHop":
        return dmi_hop(hidden, m_a, m_o, self, dropout)

    def run(self, hidden: DiffNode, hops: int = 2, dropout: Optional[Transform] = None) -> "DmiState":
        return run_dmi(hidden, self, hops, dropout)


@dataclass
class DmiHop:
    r_a: DiffNode
    r_o: DiffNode
    alpha_a: DiffNode
    alpha_o: DiffNode
    m_a: DiffNode
    m_o: DiffNode
    next_m_a: DiffNode
    next_m_o: DiffNode


@dataclass
class DmiState:
    hops: List[DmiHop] = field(default_factory=list)

    @property
    def final(self) -> DmiHop:
        return self.hops[-1]

    @property
    def r_a(self) -> DiffNode:
        return self.final.r_a

    @property
    def r_o(self) -> DiffNode:
        return self.final.r_o

    @property
    def alpha_a(self) -> DiffNode:
        return self.final.alpha_a

    @property
    def alpha_o(self) -> DiffNode:
        return self.final.alpha_o


def dmi_hop(hidden: DiffNode, m_a: DiffNode, m_o: DiffNode, memory: DualMemory,
            dropout: Optional[Transform] = None) -> DmiHop:
    """One interaction step. ``dropout`` hits both correlation matrices before they are attended over."""
    fused_a = memory.fusion_a(hidden, m_a)
    fused_o = memory.fusion_o(hidden, m_o)
    r_a = ops.concat([
        ops.bilinear(m_a, memory.g_a, fused_a),
        ops.bilinear(m_o, memory.g_ao, fused_o),
    ])
    r_o = ops.concat([
        ops.bilinear(m_o, memory.g_o, fused_o),
        ops.bilinear(m_a, memory.g_ao, fused_a, transpose=True),
    ])
    if dropout is not None:
        r_a, r_o = dropout(r_a), dropout(r_o)
    alpha_a = ops.softmax(ops.matmul(r_a, memory.w_a))
    alpha_o = ops.softmax(ops.matmul(r_o, memory.w_o))
    next_m_a = ops.add(m_a, ops.matmul(alpha_a, hidden))
    next_m_o = ops.add(m_o, ops.matmul(alpha_o, hidden))
    return DmiHop(r_a, r_o, alpha_a, alpha_o, m_a, m_o, next_m_a, next_m_o)


def run_dmi(hidden: DiffNode, memory: DualMemory, hops: int = 2,
            dropout: Optional[Transform] = None) -> DmiState:
    if hops < 1:
        raise ValueError(f"run_dmi needs at least one hop, got {hops}")
    state = DmiState()
    m_a, m_o = memory.m_a, memory.m_o
    for _ in range(hops):
        step = dmi_hop(hidden, m_a, m_o, memory, dropout)
        state.hops.append(step)
        m_a, m_o = step.next_m_a, step.next_m_o
    return state


def attention_dump(tagger, tokens: List[str]) -> AttentionDump:
    """Per-hop aspect and opinion attention of a DMI tagger over one sentence."""
    output = tagger.forward_tokens(tokens)
    if output.dmi is None:
        raise ValueError(f"mode {tagger.config.mode.value} has no memory attention to dump")
    hops: List[Dict[str, List[float]]] = []
    for step in output.dmi.hops:
        hops.append({
            "alpha_a": [float(v) for v in step.alpha_a.value],
            "alpha_o": [float(v) for v in step.alpha_o.value],
        })
    predicted = [tag.value for tag in tagger.decode(output)]
    return AttentionDump(tokens=list(tokens), hops=hops, predicted=predicted)


def render_heat_table(dump: AttentionDump, width: int = 10) -> str:
    header = ["token".ljust(16)]
    for hop in range(1, len(dump.hops) + 1):
        header += [f"a{hop}".ljust(width + 7), f"o{hop}".ljust(width + 7)]
    header.append("tag")
    lines = [" ".join(header).rstrip()]
    for i, token in enumerate(dump.tokens):
        cells = [token[:16].ljust(16)]
        for hop in dump.hops:
            for key in ("alpha_a", "alpha_o"):
                weight = hop[key][i]
                bar = "#" * int(round(weight * width))
                cells.append(f"{weight:.3f} {bar.ljust(width)} ")
        cells.append(dump.predicted[i] if i < len(dump.predicted) else "")
        lines.append(" ".join(cells).rstrip())
    return "\n".join(lines)


def memory_trace(state: DmiState) -> Optional[Dict[str, np.ndarray]]:
    """Accumulated memory movement m^{L+1} - m^1 per memory."""
    if not state.hops:
        return None
    first, last = state.hops[0], state.hops[-1]
    return {
        "aspect": last.next_m_a.value - first.m_a.value,
        "opinion": last.next_m_o.value - first.m_o.value,
    }
