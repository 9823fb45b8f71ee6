import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from abq import (
    Activation,
    AdamState,
    ConfigError,
    DimensionError,
    MlpParams,
    NumericError,
    ProtocolError,
    adam_step,
    finite_diff_check,
    init_mlp,
    mlp_backward,
    mlp_forward,
)
from abq._numeric.mlp import Layer
from tests.config import GRADCHECK_STEP


def single_layer(weights, activation=Activation.IDENTITY) -> MlpParams:
    weights = np.asarray(weights, dtype=np.float64)
    return MlpParams((Layer(weights, np.zeros(weights.shape[1]), activation),))


def test_identity_layer_forward():
    out = mlp_forward(single_layer(np.eye(2)), [[1.0, 2.0]])[-1]
    assert_array_equal(out, [[1.0, 2.0]])


def test_relu_layer_forward():
    out = mlp_forward(single_layer(np.eye(2), Activation.RELU), [[-3.0, 4.0]])[-1]
    assert_array_equal(out, [[0.0, 4.0]])


def test_forward_matches_straight_line_chain(rng):
    params = init_mlp((4, 6, 5, 3), rng)
    x = rng.normal(size=(7, 4))

    h = x
    for k, layer in enumerate(params.layers):
        z = h @ layer.weights + layer.bias
        h = z if k == len(params.layers) - 1 else np.where(z > 0, z, 0.0)

    assert_allclose(mlp_forward(params, x)[-1], h, rtol=0, atol=1e-14)
    assert len(mlp_forward(params, x)) == 4


def test_init_ranges_and_zero_bias(rng):
    params = init_mlp((10, 30), rng)
    limit = np.sqrt(6.0 / 40)
    assert np.all(np.abs(params.layers[0].weights) <= limit)
    assert_array_equal(params.layers[0].bias, np.zeros(30))


def test_forward_shape_mismatch_names_layer(rng):
    params = init_mlp((4, 6, 3), rng)
    with pytest.raises(DimensionError) as e:
        mlp_forward(params, np.zeros((2, 5)))
    assert e.value.layer == 0


def test_single_identity_layer_backward():
    params = single_layer([[0.5], [-1.0]])
    x = np.array([[2.0, 3.0]])
    grads, _ = mlp_backward(params, mlp_forward(params, x), np.ones((1, 1)))
    assert_array_equal(grads.layers[0].weights, x.T)
    assert_array_equal(grads.layers[0].bias, [1.0])


def test_zero_output_gradient(rng):
    params = init_mlp((3, 5, 2), rng)
    acts = mlp_forward(params, rng.normal(size=(4, 3)))
    grads, grad_input = mlp_backward(params, acts, np.zeros((4, 2)))
    for array in grads.arrays():
        assert not array.any()
    assert not grad_input.any()


def test_backward_rejects_foreign_activations(rng):
    params = init_mlp((3, 5, 2), rng)
    acts = mlp_forward(params, rng.normal(size=(4, 3)))
    with pytest.raises(ProtocolError):
        mlp_backward(params, acts[:-1], np.zeros((4, 2)))


def test_backward_passes_finite_differences(rng):
    params = init_mlp((4, 8, 6, 3), rng)
    x = rng.normal(size=(5, 4))
    target = rng.normal(size=(5, 3))

    def loss_fn(p):
        acts = mlp_forward(p, x)
        diff = acts[-1] - target
        grads, _ = mlp_backward(p, acts, 2.0 * diff)
        return float(np.sum(diff**2)), grads

    assert finite_diff_check(loss_fn, params, h=GRADCHECK_STEP) < 1e-6


def test_adam_zero_gradient_decays_moments(rng):
    params = init_mlp((3, 4), rng)
    state = AdamState.create(params)
    state = state._replace(first_moment=tuple(np.ones_like(a) for a in params.arrays()))
    zeros = params.with_arrays([np.zeros_like(a) for a in params.arrays()])

    _, new_state = adam_step(params, zeros, state, lr=1e-3)

    assert_allclose(new_state.first_moment[0], 0.9 * state.first_moment[0])
    assert new_state.step == 1


def test_adam_zero_gradient_fresh_state(rng):
    params = init_mlp((3, 4), rng)
    zeros = params.with_arrays([np.zeros_like(a) for a in params.arrays()])
    new_params, _ = adam_step(params, zeros, AdamState.create(params))
    for before, after in zip(params.arrays(), new_params.arrays()):
        assert_array_equal(before, after)


def test_adam_first_step_closed_form():
    p = np.array([1.0, -2.0, 0.5])
    g = np.array([0.3, -4.0, 1e-3])
    lr, eps = 1e-2, 1e-8

    new_p, state = adam_step(p, g, AdamState.create(p, eps=eps), lr=lr)

    # both bias corrections cancel at step one: m_hat = g, v_hat = g^2
    assert_allclose(new_p, p - lr * g / (np.abs(g) + eps), rtol=1e-12)
    assert state.step == 1


def test_adam_constant_gradient_approaches_sign():
    p = np.zeros(3)
    g = np.array([2.0, -0.5, 1e-2])
    state = AdamState.create(p)
    lr = 1e-3
    for _ in range(2000):
        before = p
        p, state = adam_step(p, g, state, lr=lr)
    assert_allclose(before - p, lr * np.sign(g), rtol=1e-4)
    assert state.step == 2000


def test_adam_shape_mismatch():
    p = np.zeros(3)
    with pytest.raises(DimensionError):
        adam_step(p, np.zeros(4), AdamState.create(p))


def test_adam_is_deterministic(rng):
    params = init_mlp((3, 4, 2), rng)
    grads = params.with_arrays([rng.normal(size=a.shape) for a in params.arrays()])
    a, _ = adam_step(params, grads, AdamState.create(params))
    b, _ = adam_step(params, grads, AdamState.create(params))
    for x, y in zip(a.arrays(), b.arrays()):
        assert_array_equal(x, y)


def test_gradcheck_sum_of_squares(rng):
    p = rng.normal(size=20)
    assert finite_diff_check(lambda q: (float(np.sum(q**2)), 2.0 * q), p) < 1e-9


def test_gradcheck_constant_loss(rng):
    p = rng.normal(size=10)
    assert finite_diff_check(lambda q: (3.0, np.zeros_like(q)), p) == pytest.approx(0.0)


def test_gradcheck_detects_wrong_gradient(rng):
    p = rng.normal(size=10)
    assert finite_diff_check(lambda q: (float(np.sum(q**2)), 3.0 * q), p) > 0.1


@pytest.mark.parametrize('h', (1e-9, 1e-3))
def test_gradcheck_step_range(h):
    with pytest.raises(ConfigError):
        finite_diff_check(lambda q: (0.0, q), np.zeros(2), h=h)


def test_gradcheck_non_finite_loss():
    with pytest.raises(NumericError):
        finite_diff_check(lambda q: (float('nan'), q), np.zeros(2))


def test_gradcheck_samples_coordinates(rng):
    p = rng.normal(size=1000)
    calls = []

    def loss_fn(q):
        calls.append(1)
        return float(np.sum(q**2)), 2.0 * q

    finite_diff_check(loss_fn, p, coordinates=10, rng=rng)
    assert len(calls) == 1 + 4 * 10
