import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from diffcore import (AdamState, GraphError, ParamStore, ShapeError, adam_step, backward, check_gradients,
                      clip_global_norm, constant, find_non_finite, finite_difference_check, get_dtype, precision,
                      variable)
from diffcore import ops
from diffcore.params import DISCRIMINATOR, FEATURE, WORD_PREDICTOR


def _scalar(node):
    """Scalar readout sum(w * node) through ops only."""
    weights = constant(np.linspace(0.5, 1.5, node.value.size).reshape(node.shape))
    flat = ops.mul(node, weights)
    if flat.ndim == 2:
        flat = ops.matmul(constant(np.ones(flat.shape[0])), flat)
    if flat.ndim == 1:
        flat = ops.matmul(flat, constant(np.ones(flat.shape[0])))
    return flat


@pytest.mark.parametrize("name", ["add", "mul", "matmul", "affine", "concat", "relu", "tanh", "sigmoid",
                                  "softmax", "log", "bilinear", "bilinear_t", "repeat_rows", "gather_rows",
                                  "lstm", "lstm_reverse", "nll_weighted"])
def test_primitive_gradients_match_central_differences(float64, name):
    rng = np.random.default_rng(0)
    a = variable(rng.normal(size=(3, 4)), "a")
    b = variable(rng.normal(size=(3, 4)), "b")
    w = variable(rng.normal(size=(4, 2)), "w")
    bias = variable(rng.normal(size=2), "bias")
    m = variable(rng.normal(size=4), "m")
    g = variable(rng.normal(size=(2, 4, 4)), "g")
    pos = variable(rng.uniform(0.5, 2.0, size=(3, 4)), "pos")
    lw = variable(rng.uniform(-0.5, 0.5, size=(4, 8)), "lw")
    lu = variable(rng.uniform(-0.5, 0.5, size=(2, 8)), "lu")
    lb = variable(rng.uniform(-0.5, 0.5, size=8), "lb")
    sel = variable(rng.uniform(0.1, 1.0, size=3), "sel")
    builders = {
        "add": (lambda: ops.add(a, b), [a, b]),
        "mul": (lambda: ops.mul(a, b), [a, b]),
        "matmul": (lambda: ops.matmul(a, w), [a, w]),
        "affine": (lambda: ops.affine(a, w, bias), [a, w, bias]),
        "concat": (lambda: ops.concat([a, b]), [a, b]),
        "relu": (lambda: ops.relu(a), [a]),
        "tanh": (lambda: ops.tanh(a), [a]),
        "sigmoid": (lambda: ops.sigmoid(a), [a]),
        "softmax": (lambda: ops.softmax(a), [a]),
        "log": (lambda: ops.log(pos), [pos]),
        "bilinear": (lambda: ops.bilinear(m, g, a), [m, g, a]),
        "bilinear_t": (lambda: ops.bilinear(m, g, a, transpose=True), [m, g, a]),
        "repeat_rows": (lambda: ops.repeat_rows(m, 3), [m]),
        "gather_rows": (lambda: ops.gather_rows(a, np.array([2, 0, 2])), [a]),
        "lstm": (lambda: ops.lstm_scan(a, lw, lu, lb), [a, lw, lu, lb]),
        "lstm_reverse": (lambda: ops.lstm_scan(a, lw, lu, lb, reverse=True), [a, lw, lu, lb]),
        "nll_weighted": (lambda: ops.nll(ops.softmax(a), [1, 0, 3], sel), [a, sel]),
    }
    build, leaves = builders[name]
    report = check_gradients(lambda: _scalar(build()), {leaf.name: leaf for leaf in leaves}, samples=8)
    assert report.max_error < 1e-6, report.per_param


def test_backward_needs_a_scalar_root(float64):
    x = variable(np.ones((2, 2)))
    with pytest.raises(GraphError):
        backward(ops.tanh(x))


def test_shape_error_names_the_op_and_both_shapes():
    with pytest.raises(ShapeError) as info:
        ops.add(variable(np.ones((2, 3))), variable(np.ones((4, 5))))
    message = str(info.value)
    assert "add" in message and "(2, 3)" in message and "(4, 5)" in message


def test_nll_of_uniform_binary_is_ln2(float64):
    probs = ops.softmax(variable(np.zeros(2)))
    assert float(ops.nll(probs, [0]).value) == pytest.approx(math.log(2))


def test_grad_reverse_is_identity_forward_and_scales_backward(float64):
    rng = np.random.default_rng(3)
    for lam in (0.0, 0.1, 1.0):
        x = variable(rng.normal(size=(3, 2)))
        plain = variable(x.value.copy())
        weights = constant(rng.normal(size=(3, 2)))
        reversed_out = ops.grad_reverse(x, lam)
        assert_array_equal(reversed_out.value, x.value)
        backward(_scalar(ops.mul(reversed_out, weights)))
        backward(_scalar(ops.mul(plain, weights)))
        assert_allclose(x.grad, -lam * plain.grad, atol=1e-12)


def test_grad_reverse_rejects_negative_rate():
    with pytest.raises(ValueError):
        ops.grad_reverse(variable(np.ones(2)), -0.5)


def test_dropout_is_identity_outside_training(rng):
    x = variable(np.ones((4, 3)))
    assert ops.dropout(x, 0.5, False, rng) is x
    assert ops.dropout(x, 0.0, True, rng) is x


def test_dropout_scales_kept_units(rng):
    out = ops.dropout(variable(np.ones((50, 20))), 0.5, True, rng).value
    assert set(np.unique(out)) <= {0.0, 2.0}


def test_lstm_at_zero_parameters_outputs_zero(float64):
    x = variable(np.random.default_rng(1).normal(size=(5, 3)))
    out = ops.lstm_scan(x, variable(np.zeros((3, 8))), variable(np.zeros((2, 8))), variable(np.zeros(8)))
    assert_array_equal(out.value, np.zeros((5, 2)))


def test_reverse_lstm_equals_forward_on_reversed_input(float64):
    rng = np.random.default_rng(2)
    x = rng.normal(size=(6, 3))
    params = [variable(rng.uniform(-0.3, 0.3, size=s)) for s in ((3, 8), (2, 8), (8,))]
    backward_run = ops.lstm_scan(constant(x), *params, reverse=True).value
    oracle = ops.lstm_scan(constant(x[::-1].copy()), *params).value[::-1]
    assert_allclose(backward_run, oracle, atol=1e-12)


def test_find_non_finite_reports_the_earliest_bad_node(float64):
    x = variable(np.array([1.0, -1.0]))
    bad = ops.log(ops.relu(x))
    bad.value[1] = np.nan
    later = ops.tanh(bad)
    assert find_non_finite(later) is bad


def test_precision_context_restores_previous_dtype():
    before = get_dtype()
    with precision("float64"):
        assert get_dtype() is np.float64
    assert get_dtype() is before
    with pytest.raises(ValueError):
        with precision("float16"):
            pass


def test_param_store_rejects_duplicates_and_unknown_partitions(rng):
    store = ParamStore()
    store.uniform("w", (2, 2), 0.2, rng, FEATURE)
    with pytest.raises(GraphError):
        store.zeros("w", (2,), FEATURE)
    with pytest.raises(GraphError):
        store.zeros("v", (2,), "optimizer")


def _store_with_grads(value, grad, partition=FEATURE, name="p"):
    store = ParamStore()
    node = store.add(name, np.array(value, dtype=float), partition)
    node.grad = np.array(grad, dtype=node.value.dtype)
    return store, node


def test_adam_first_step_moves_by_learning_rate(float64):
    store, node = _store_with_grads([0.5], [1.0])
    adam_step(store, AdamState(lr=0.001))
    assert node.value[0] == pytest.approx(0.499, abs=1e-9)
    assert_array_equal(node.grad, [0.0])


def test_adam_zero_gradient_leaves_parameters(float64):
    store, node = _store_with_grads([0.5, -1.0], [0.0, 0.0])
    state = AdamState()
    adam_step(store, state)
    adam_step(store, state)
    assert_array_equal(node.value, [0.5, -1.0])
    assert state.t == 2


def test_adam_subset_never_touches_other_partitions(float64, rng):
    store = ParamStore()
    feature = store.uniform("f", (3,), 0.2, rng, FEATURE)
    disc = store.uniform("d", (3,), 0.2, rng, DISCRIMINATOR)
    before = feature.value.copy()
    feature.grad = np.ones(3)
    disc.grad = np.ones(3)
    adam_step(store, AdamState(), [DISCRIMINATOR])
    assert_array_equal(feature.value, before)


def test_adam_requires_gradients_for_the_subset(float64, rng):
    store = ParamStore()
    store.uniform("w", (2,), 0.2, rng, WORD_PREDICTOR)
    with pytest.raises(GraphError):
        adam_step(store, AdamState(), [WORD_PREDICTOR])


def test_clip_global_norm_halves_a_norm_of_eighty(float64):
    store, node = _store_with_grads([0.0, 0.0], [48.0, 64.0])
    assert clip_global_norm(store, max_norm=40.0) == pytest.approx(0.5)
    assert_allclose(node.grad, [24.0, 32.0])
    assert clip_global_norm(store, max_norm=40.0) == 1.0


def test_finite_difference_check_flags_a_wrong_backward(float64):
    x = variable(np.array([0.3, -1.2, 2.0]), "x")
    square = lambda: ops.matmul(ops.mul(x, x), constant(np.ones(3)))  # noqa: E731
    assert finite_difference_check(square, {"x": x}) < 1e-8

    def doubled():
        out = square()
        original = out._backward
        out._backward = lambda g: original(2 * g)
        return out

    assert finite_difference_check(doubled, {"x": x}) > 0.25


def test_tiny_gradients_are_not_waved_through(float64):
    x = variable(np.array([0.3, -1.2, 2.0]), "x")
    scale = constant(np.full(3, 1e-10))

    def doubled():
        out = ops.matmul(ops.mul(x, x), scale)
        original = out._backward
        out._backward = lambda g: original(2 * g)
        return out

    assert finite_difference_check(doubled, {"x": x}) > 1e-3
