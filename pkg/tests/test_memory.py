import numpy as np
import pytest
from numpy.testing import assert_allclose

from diffcore import ParamStore, check_gradients, constant, variable
from diffcore import ops
from network.memory import DualMemory, ResidualFusion, dmi_hop, glmi, memory_trace, render_heat_table, run_dmi
from models.reports import AttentionDump


def _memory(dim=4, slices=2, seed=0, learned_init=True):
    store = ParamStore()
    return store, DualMemory(store, dim, slices, np.random.default_rng(seed), learned_init=learned_init)


def _softmax(z):
    e = np.exp(z - z.max())
    return e / e.sum()


def _oracle_hop(h, m_a, m_o, params):
    """Dense recomputation of one hop straight from the definitions."""
    def fuse(m, w, b):
        joined = np.concatenate([h, np.tile(m, (h.shape[0], 1))], axis=1)
        return h + np.maximum(joined @ w + b, 0)

    def corr(m, g, fused, transpose=False):
        return np.array([[m @ (g[k].T if transpose else g[k]) @ row for k in range(g.shape[0])] for row in fused])

    fa = fuse(m_a, params["dmi.theta_a.W"], params["dmi.theta_a.b"])
    fo = fuse(m_o, params["dmi.theta_o.W"], params["dmi.theta_o.b"])
    r_a = np.concatenate([corr(m_a, params["dmi.G_a"], fa), corr(m_o, params["dmi.G_ao"], fo)], axis=1)
    r_o = np.concatenate([corr(m_o, params["dmi.G_o"], fo), corr(m_a, params["dmi.G_ao"], fa, True)], axis=1)
    alpha_a = _softmax(r_a @ params["dmi.w_a"])
    alpha_o = _softmax(r_o @ params["dmi.w_o"])
    return r_a, r_o, alpha_a, alpha_o, m_a + alpha_a @ h, m_o + alpha_o @ h


def test_glmi_with_zero_transform_is_a_plain_bilinear_form(float64):
    fusion = ResidualFusion(variable(np.zeros((4, 2))), variable(np.zeros(2)))
    g = variable(np.array([[[1.0, 2.0], [3.0, 4.0]]]))
    r = glmi(constant([[0.0, 1.0]]), constant([1.0, 0.0]), fusion, g)
    assert_allclose(r.value, [[2.0]])


def test_glmi_with_zero_memory_is_zero(float64, rng):
    fusion = ResidualFusion(variable(rng.normal(size=(6, 3))), variable(rng.normal(size=3)))
    r = glmi(constant(rng.normal(size=(5, 3))), constant(np.zeros(3)), fusion, variable(rng.normal(size=(4, 3, 3))))
    assert_allclose(r.value, np.zeros((5, 4)))


def test_residual_fusion_is_identity_when_the_transform_is_zero(float64, rng):
    h = constant(rng.normal(size=(3, 2)))
    fusion = ResidualFusion(variable(np.zeros((4, 2))), variable(np.zeros(2)))
    assert_allclose(fusion(h, constant(rng.normal(size=2))).value, h.value)


def test_single_word_gets_all_attention(float64):
    _, memory = _memory()
    h = constant(np.random.default_rng(1).normal(size=(1, 4)))
    hop = dmi_hop(h, memory.m_a, memory.m_o, memory)
    assert_allclose(hop.alpha_a.value, [1.0])
    assert_allclose(hop.next_m_a.value, memory.m_a.value + h.value[0])


def test_zero_attention_weights_average_the_words(float64):
    _, memory = _memory()
    memory.w_a.value[...] = 0
    h = constant(np.random.default_rng(2).normal(size=(5, 4)))
    hop = dmi_hop(h, memory.m_a, memory.m_o, memory)
    assert_allclose(hop.alpha_a.value, np.full(5, 0.2))
    assert_allclose(hop.next_m_a.value, memory.m_a.value + h.value.mean(axis=0))


def test_hops_match_a_dense_oracle(float64):
    store, memory = _memory(dim=2, slices=1, seed=3)
    params = {name: node.value for name, node in store.items()}
    h = np.random.default_rng(4).normal(size=(2, 2))
    state = run_dmi(constant(h), memory, hops=2)
    m_a, m_o = params["dmi.m_a"], params["dmi.m_o"]
    for hop in state.hops:
        r_a, r_o, alpha_a, alpha_o, m_a, m_o = _oracle_hop(h, m_a, m_o, params)
        assert_allclose(hop.r_a.value, r_a, atol=1e-12)
        assert_allclose(hop.r_o.value, r_o, atol=1e-12)
        assert_allclose(hop.alpha_a.value, alpha_a, atol=1e-12)
        assert_allclose(hop.alpha_o.value, alpha_o, atol=1e-12)
        assert_allclose(hop.next_m_a.value, m_a, atol=1e-12)
        assert_allclose(hop.next_m_o.value, m_o, atol=1e-12)


def test_one_hop_run_equals_a_single_hop(float64):
    _, memory = _memory(seed=5)
    h = constant(np.random.default_rng(5).normal(size=(3, 4)))
    single = dmi_hop(h, memory.m_a, memory.m_o, memory)
    assert_allclose(run_dmi(h, memory, hops=1).r_a.value, single.r_a.value)


def test_attention_and_memory_algebra_over_random_configurations(float64):
    rng = np.random.default_rng(11)
    for trial in range(200):
        dim, slices, steps, hops = (int(v) for v in (rng.integers(2, 6), rng.integers(1, 4), rng.integers(1, 7),
                                                      rng.integers(1, 4)))
        _, memory = _memory(dim, slices, seed=trial)
        h = rng.normal(size=(steps, dim))
        state = run_dmi(constant(h), memory, hops)
        moved = {"aspect": np.zeros(dim), "opinion": np.zeros(dim)}
        for hop in state.hops:
            for alpha in (hop.alpha_a.value, hop.alpha_o.value):
                assert alpha.min() >= 0
                assert abs(alpha.sum() - 1) <= 1e-6
            moved["aspect"] += hop.alpha_a.value @ h
            moved["opinion"] += hop.alpha_o.value @ h
        trace = memory_trace(state)
        assert_allclose(trace["aspect"], moved["aspect"], atol=1e-9)
        assert_allclose(trace["opinion"], moved["opinion"], atol=1e-9)


def test_every_hop_reads_the_same_parameter_nodes(float64):
    _, memory = _memory()
    h = constant(np.random.default_rng(6).normal(size=(3, 4)))
    state = run_dmi(h, memory, hops=3)
    correlations = [hop.r_a for hop in state.hops]
    for r in correlations:
        bilinear = r.parents[0]
        assert bilinear.parents[1] is memory.g_a


def test_permuting_words_permutes_outputs(float64):
    _, memory = _memory(seed=8)
    h = np.random.default_rng(8).normal(size=(4, 4))
    order = np.array([2, 0, 3, 1])
    base = run_dmi(constant(h), memory, 2)
    permuted = run_dmi(constant(h[order]), memory, 2)
    assert_allclose(permuted.r_a.value, base.r_a.value[order], atol=1e-12)
    assert_allclose(permuted.alpha_o.value, base.alpha_o.value[order], atol=1e-12)
    assert_allclose(permuted.hops[-1].next_m_a.value, base.hops[-1].next_m_a.value, atol=1e-12)


def test_zero_initial_memories_give_uniform_first_hop(float64):
    store, memory = _memory(learned_init=False)
    assert "dmi.m_a" not in store
    state = run_dmi(constant(np.random.default_rng(9).normal(size=(4, 4))), memory, 2)
    assert_allclose(state.hops[0].alpha_a.value, np.full(4, 0.25))


def test_two_hop_gradients_match_central_differences(float64):
    store, memory = _memory(dim=4, slices=2, seed=10)
    h = variable(np.random.default_rng(10).normal(size=(3, 4)), "h")
    weights = constant(np.random.default_rng(11).normal(size=(3, 8)))

    def loss():
        state = run_dmi(h, memory, hops=2)
        readout = ops.concat([state.r_a, state.r_o])
        picked = ops.mul(readout, weights)
        total = ops.matmul(ops.matmul(constant(np.ones(3)), picked), constant(np.ones(8)))
        return ops.add(total, ops.matmul(state.hops[-1].next_m_o, constant(np.ones(4))))

    nodes = dict(store.items())
    nodes["h"] = h
    report = check_gradients(loss, nodes, samples=10)
    assert report.max_error < 1e-4, report.per_param


def test_heat_table_has_a_row_per_token():
    dump = AttentionDump(tokens=["the", "pizza"], hops=[{"alpha_a": [0.1, 0.9], "alpha_o": [0.5, 0.5]}],
                         predicted=["O", "S-POS"])
    table = render_heat_table(dump).splitlines()
    assert len(table) == 3
    assert "0.900" in table[2] and "S-POS" in table[2]
    assert "#########" in table[2]


def test_dropout_hits_the_correlations_of_every_hop(float64):
    _, memory = _memory(seed=12)
    h = constant(np.random.default_rng(12).normal(size=(5, 4)))
    rng = np.random.default_rng(3)
    state = run_dmi(h, memory, hops=3, dropout=lambda node: ops.dropout(node, 0.5, True, rng))
    for step in state.hops:
        logits = step.alpha_a.parents[0]
        assert logits.parents[0] is step.r_a and step.r_a.op == "dropout"
        assert step.r_o.op == "dropout"
    plain = run_dmi(h, memory, hops=3, dropout=lambda node: ops.dropout(node, 0.5, False, rng))
    assert all(step.r_a.op == "concat" for step in plain.hops)
