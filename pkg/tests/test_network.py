import math

import numpy as np
import pytest

from hybridyield.errors import ConfigError, DivergenceError, EmptyInputError, ShapeError
from hybridyield.network import (
    Activation,
    NetworkParams,
    NetworkTopology,
    activate,
    activate_deriv,
    flatten_weights,
    forward,
    gradient,
    init_params,
    mse_loss,
    predict,
    train_backprop,
)

TANH_1 = 0.7615941559557649  # math.tanh(1.0), frozen reference


def small_topology(hidden_act=Activation.TANH, output_act=Activation.IDENTITY):
    return NetworkTopology(3, 4, hidden_act, output_act)


def test_activation_identity_passthrough():
    assert activate(Activation.IDENTITY, 3.5) == 3.5


def test_activation_logistic_at_zero():
    assert activate(Activation.LOGISTIC, 0.0) == 0.5


def test_activation_tanh_reference_value():
    assert activate(Activation.TANH, 1.0) == pytest.approx(TANH_1, abs=1e-15)


@pytest.mark.parametrize("kind", list(Activation))
def test_activation_derivative_matches_finite_differences(kind):
    xs = np.linspace(-3.0, 3.0, 41)
    xs = xs[np.abs(xs) > 1e-9]  # avoid the rectifier kink
    h = 1e-6
    fd = (activate(kind, xs + h) - activate(kind, xs - h)) / (2 * h)
    np.testing.assert_allclose(activate_deriv(kind, xs), fd, atol=1e-8)


@pytest.mark.parametrize("kind", list(Activation))
def test_activation_derivative_defined_everywhere(kind):
    xs = np.array([-1e6, -1.0, 0.0, 1.0, 1e6])
    assert np.all(np.isfinite(activate_deriv(kind, xs)))


def test_topology_param_count():
    topo = NetworkTopology(7, 8)
    assert topo.param_count == (7 + 1) * 8 + (8 + 1)


@pytest.mark.parametrize("n_hidden", [0, 1, 100, 150])
def test_topology_rejects_out_of_range_hidden(n_hidden):
    with pytest.raises(ConfigError):
        NetworkTopology(3, n_hidden)


def test_params_length_must_match():
    topo = small_topology()
    with pytest.raises(ShapeError):
        NetworkParams(topo, np.zeros(topo.param_count + 1))


def test_flatten_unflatten_round_trip():
    topo = small_topology()
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = rng.normal(size=topo.param_count)
        params = NetworkParams(topo, v)
        rebuilt = flatten_weights(topo, *params.unflatten())
        np.testing.assert_array_equal(rebuilt.values, v)


def test_unflatten_layout_is_documented_order():
    topo = NetworkTopology(2, 3)
    v = np.arange(topo.param_count, dtype=float)
    w_hidden, b_hidden, w_out, b_out = NetworkParams(topo, v).unflatten()
    np.testing.assert_array_equal(w_hidden, [[0, 1], [2, 3], [4, 5]])
    np.testing.assert_array_equal(b_hidden, [6, 7, 8])
    np.testing.assert_array_equal(w_out, [9, 10, 11])
    assert b_out == 12


@pytest.mark.parametrize(
    "out_act,expected",
    [(Activation.IDENTITY, 0.0), (Activation.LOGISTIC, 0.5), (Activation.TANH, 0.0)],
)
def test_forward_zero_network(out_act, expected):
    topo = small_topology(output_act=out_act)
    params = NetworkParams(topo, np.zeros(topo.param_count))
    assert forward(params, [1.0, -2.0, 3.0]) == expected


def test_forward_identity_composition():
    # 1 input, 2 hidden, identity activations, unit weights, zero biases:
    # output = w_out . (w_hidden * x) = 2x with these values
    topo = NetworkTopology(1, 2, Activation.IDENTITY, Activation.IDENTITY)
    params = flatten_weights(topo, [[1.0], [0.0]], [0.0, 0.0], [1.0, 0.0], 0.0)
    assert forward(params, [2.0]) == 2.0


def _forward_oracle(topo, values, x):
    """Independent forward pass from the flat layout, scalar loops only."""
    n_in, n_hid = topo.n_inputs, topo.n_hidden
    hidden = []
    for j in range(n_hid):
        z = sum(values[j * n_in + i] * x[i] for i in range(n_in))
        z += values[n_hid * n_in + j]
        hidden.append(float(activate(topo.hidden_activation, z)))
    z_out = sum(values[n_hid * n_in + n_hid + j] * hidden[j] for j in range(n_hid))
    z_out += values[n_hid * n_in + 2 * n_hid]
    return float(activate(topo.output_activation, z_out))


def test_forward_matches_matrix_oracle():
    rng = np.random.default_rng(7)
    for kind in (Activation.TANH, Activation.LOGISTIC, Activation.SOFTPLUS):
        topo = NetworkTopology(4, 5, kind, Activation.IDENTITY)
        values = rng.normal(size=topo.param_count)
        params = NetworkParams(topo, values)
        x = rng.normal(size=4)
        assert forward(params, x) == pytest.approx(
            _forward_oracle(topo, values, x), rel=1e-12
        )


def test_forward_is_pure():
    params = init_params(small_topology(), seed=3, scale=0.5)
    x = np.array([0.3, -0.7, 1.1])
    assert forward(params, x) == forward(params, x)


def test_forward_affine_with_identity_activations():
    topo = NetworkTopology(3, 4, Activation.IDENTITY, Activation.IDENTITY)
    params = init_params(topo, seed=5, scale=1.0)
    w_hidden, b_hidden, w_out, b_out = params.unflatten()
    # closed form: w_out . (W x + b) + b_out
    weights = w_out @ w_hidden
    intercept = float(w_out @ b_hidden + b_out)
    rng = np.random.default_rng(11)
    for _ in range(10):
        x = rng.normal(size=3)
        assert forward(params, x) == pytest.approx(float(weights @ x) + intercept, rel=1e-12)


def test_forward_rejects_wrong_input_shape():
    params = init_params(small_topology(), seed=0)
    with pytest.raises(ShapeError):
        forward(params, [1.0, 2.0])


def test_gradient_zero_at_perfect_fit():
    topo = small_topology(output_act=Activation.IDENTITY)
    params = init_params(topo, seed=9, scale=0.5)
    X = np.random.default_rng(1).normal(size=(6, 3))
    y = predict(params, X)  # targets equal predictions
    np.testing.assert_allclose(gradient(params, X, y), 0.0, atol=1e-12)


def relative_gradient_error(params, X, y, step=1e-6):
    g = gradient(params, X, y)
    fd = np.empty_like(g)
    base = params.values
    for i in range(base.size):
        up = base.copy()
        up[i] += step
        down = base.copy()
        down[i] -= step
        fd[i] = (
            mse_loss(params.with_values(up), X, y) - mse_loss(params.with_values(down), X, y)
        ) / (2 * step)
    denom = max(np.linalg.norm(g), np.linalg.norm(fd), 1e-12)
    return np.linalg.norm(g - fd) / denom


@pytest.mark.parametrize("hidden_act", list(Activation))
@pytest.mark.parametrize("output_act", [Activation.IDENTITY, Activation.LOGISTIC])
def test_gradient_matches_finite_differences(hidden_act, output_act):
    rng = np.random.default_rng(int(hidden_act) * 10 + int(output_act))
    topo = NetworkTopology(3, 5, hidden_act, output_act)
    params = NetworkParams(topo, rng.normal(scale=0.8, size=topo.param_count))
    X = rng.normal(size=(8, 3))
    y = rng.normal(size=8)
    assert relative_gradient_error(params, X, y) < 1e-5


def test_gradient_output_bias_negates_with_targets():
    topo = small_topology(output_act=Activation.IDENTITY)
    params = NetworkParams(topo, np.zeros(topo.param_count))
    X = np.random.default_rng(2).normal(size=(5, 3))
    y = np.array([1.0, 2.0, -1.0, 0.5, 3.0])
    g_pos = gradient(params, X, y)
    g_neg = gradient(params, X, -y)
    assert g_neg[-1] == pytest.approx(-g_pos[-1])


def test_gradient_rejects_empty_batch():
    params = init_params(small_topology(), seed=0)
    with pytest.raises(EmptyInputError):
        gradient(params, np.empty((0, 3)), np.empty(0))


def linear_problem(seed=0, n=40):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, size=(n, 3))
    y = X @ np.array([1.0, -2.0, 0.5]) + 0.3
    return X, y


def test_train_backprop_descends_on_linear_target():
    topo = NetworkTopology(3, 4, Activation.IDENTITY, Activation.IDENTITY)
    params = init_params(topo, seed=4, scale=0.3)
    X, y = linear_problem()
    initial = mse_loss(params, X[:30], y[:30])
    best, history = train_backprop(
        params, (X[:30], y[:30]), (X[30:], y[30:]), lr=0.01, max_epochs=200, patience=200
    )
    assert history.train_losses[-1] < initial


def test_train_backprop_patience_zero_stops_at_first_non_improvement():
    topo = NetworkTopology(3, 4, Activation.IDENTITY, Activation.IDENTITY)
    params = init_params(topo, seed=4, scale=0.3)
    X, y = linear_problem()
    _, history = train_backprop(
        params, (X[:30], y[:30]), (X[30:], y[30:]), lr=0.01, max_epochs=500, patience=0
    )
    vals = history.val_losses
    # every epoch but the last strictly improved on the running best
    best_so_far = mse_loss(params, X[30:], y[30:])
    for v in vals[:-1]:
        assert v < best_so_far
        best_so_far = v
    assert vals[-1] >= best_so_far or history.stopped_epoch == 500


def test_train_backprop_is_deterministic():
    topo = NetworkTopology(3, 4)
    params = init_params(topo, seed=10, scale=0.4)
    X, y = linear_problem(seed=3)
    runs = [
        train_backprop(params, (X[:30], y[:30]), (X[30:], y[30:]), 0.05, 50, 10)
        for _ in range(2)
    ]
    np.testing.assert_array_equal(runs[0][0].values, runs[1][0].values)
    assert runs[0][1].train_losses == runs[1][1].train_losses
    assert runs[0][1].val_losses == runs[1][1].val_losses


def test_train_backprop_never_worse_than_initial_validation():
    X, y = linear_problem(seed=8)
    for seed in range(5):
        topo = NetworkTopology(3, 5)
        params = init_params(topo, seed=seed, scale=0.5)
        initial_val = mse_loss(params, X[30:], y[30:])
        best, _ = train_backprop(
            params, (X[:30], y[:30]), (X[30:], y[30:]), lr=0.5, max_epochs=60, patience=5
        )
        assert mse_loss(best, X[30:], y[30:]) <= initial_val


def test_train_backprop_divergence_names_epoch():
    topo = NetworkTopology(3, 4, Activation.IDENTITY, Activation.IDENTITY)
    params = init_params(topo, seed=1, scale=0.5)
    X = np.random.default_rng(0).uniform(5, 10, size=(20, 3))
    y = 100.0 * X[:, 0]
    with pytest.raises(DivergenceError, match="epoch"):
        train_backprop(params, (X, y), (X, y), lr=5.0, max_epochs=200, patience=200)


def test_train_backprop_rejects_empty_train():
    params = init_params(small_topology(), seed=0)
    with pytest.raises(EmptyInputError):
        train_backprop(
            params, (np.empty((0, 3)), np.empty(0)), (np.ones((1, 3)), np.ones(1)), 0.1, 10, 2
        )


@pytest.mark.parametrize("lr", [0.0, -1.0, 5.001])
def test_train_backprop_rejects_learning_rate_outside_contract(lr):
    params = init_params(small_topology(), seed=0)
    X, y = linear_problem()
    with pytest.raises(ConfigError):
        train_backprop(params, (X, y), (X, y), lr, 10, 2)


def test_init_params_deterministic_and_bounded():
    topo = small_topology()
    a = init_params(topo, seed=42, scale=0.5)
    b = init_params(topo, seed=42, scale=0.5)
    np.testing.assert_array_equal(a.values, b.values)
    assert np.all(np.abs(a.values) <= 0.5)


def test_init_params_different_seeds_differ():
    topo = small_topology()
    for seed in range(100):
        a = init_params(topo, seed=seed, scale=0.5)
        b = init_params(topo, seed=seed + 1000, scale=0.5)
        assert np.any(a.values != b.values)


def test_init_params_rejects_nonpositive_scale():
    with pytest.raises(ConfigError):
        init_params(small_topology(), seed=0, scale=0.0)
