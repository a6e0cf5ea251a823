"""Single-hidden-layer feedforward regression network.

The network maps an input vector through one hidden layer to a scalar
prediction.  All weights and biases live in one flat float64 vector so that
population-based optimizers and gradient descent can share the same search
space.  Flat layout, in order:

    [hidden weights, row-major (n_hidden x n_inputs) |
     hidden biases (n_hidden) |
     output weights (n_hidden) |
     output bias (1)]
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import ConfigError, DivergenceError, EmptyInputError, ShapeError


class Activation(IntEnum):
    """Activation catalog; integer codes 1..5 are part of the search space."""

    IDENTITY = 1
    LOGISTIC = 2
    TANH = 3
    RELU = 4
    SOFTPLUS = 5


def activate(kind: Activation, x):
    """Apply the activation `kind` elementwise to `x` (scalar or array)."""
    x = np.asarray(x, dtype=np.float64)
    if kind == Activation.IDENTITY:
        return x + 0.0
    if kind == Activation.LOGISTIC:
        return _stable_logistic(x)
    if kind == Activation.TANH:
        return np.tanh(x)
    if kind == Activation.RELU:
        return np.maximum(x, 0.0)
    if kind == Activation.SOFTPLUS:
        # log(1 + e^x) computed without overflow for large |x|
        return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))
    raise ConfigError(f"unknown activation code {kind!r}")


def activate_deriv(kind: Activation, x):
    """Derivative of `activate(kind, .)` at `x`, defined for every real input.

    The rectifier uses the subgradient value 0 at x = 0.
    """
    x = np.asarray(x, dtype=np.float64)
    if kind == Activation.IDENTITY:
        return np.ones_like(x)
    if kind == Activation.LOGISTIC:
        s = _stable_logistic(x)
        return s * (1.0 - s)
    if kind == Activation.TANH:
        t = np.tanh(x)
        return 1.0 - t * t
    if kind == Activation.RELU:
        return (x > 0.0).astype(np.float64)
    if kind == Activation.SOFTPLUS:
        return _stable_logistic(x)
    raise ConfigError(f"unknown activation code {kind!r}")


def _stable_logistic(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass(frozen=True)
class NetworkTopology:
    """Shape descriptor: n_inputs -> n_hidden -> 1."""

    n_inputs: int
    n_hidden: int
    hidden_activation: Activation = Activation.TANH
    output_activation: Activation = Activation.IDENTITY

    def __post_init__(self):
        if self.n_inputs < 1:
            raise ConfigError(f"n_inputs must be >= 1, got {self.n_inputs}")
        if not 1 < self.n_hidden < 100:
            raise ConfigError(
                f"n_hidden must satisfy 1 < n_hidden < 100, got {self.n_hidden}"
            )
        object.__setattr__(self, "hidden_activation", Activation(self.hidden_activation))
        object.__setattr__(self, "output_activation", Activation(self.output_activation))

    @property
    def param_count(self) -> int:
        return (self.n_inputs + 1) * self.n_hidden + (self.n_hidden + 1)


@dataclass(frozen=True)
class NetworkParams:
    """A topology plus the flat parameter vector that fills it."""

    topology: NetworkTopology
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.shape[0] != self.topology.param_count:
            raise ShapeError(
                f"expected {self.topology.param_count} parameters, "
                f"got vector of shape {values.shape}"
            )
        object.__setattr__(self, "values", values)

    def unflatten(self):
        """Split the flat vector into (W_hidden, b_hidden, w_out, b_out)."""
        n_in, n_hid = self.topology.n_inputs, self.topology.n_hidden
        v = self.values
        k = n_hid * n_in
        w_hidden = v[:k].reshape(n_hid, n_in)
        b_hidden = v[k : k + n_hid]
        w_out = v[k + n_hid : k + 2 * n_hid]
        b_out = v[k + 2 * n_hid]
        return w_hidden, b_hidden, w_out, b_out

    def with_values(self, values: np.ndarray) -> "NetworkParams":
        return NetworkParams(self.topology, values)


def flatten_weights(topology: NetworkTopology, w_hidden, b_hidden, w_out, b_out) -> NetworkParams:
    """Inverse of `NetworkParams.unflatten`."""
    values = np.concatenate(
        [
            np.asarray(w_hidden, dtype=np.float64).reshape(-1),
            np.asarray(b_hidden, dtype=np.float64).reshape(-1),
            np.asarray(w_out, dtype=np.float64).reshape(-1),
            np.atleast_1d(np.float64(b_out)),
        ]
    )
    return NetworkParams(topology, values)


def init_params(topology: NetworkTopology, seed: int, scale: float = 0.5) -> NetworkParams:
    """Draw every parameter uniformly from [-scale, +scale], seeded."""
    if scale <= 0:
        raise ConfigError(f"scale must be > 0, got {scale}")
    rng = np.random.default_rng(seed)
    values = rng.uniform(-scale, scale, size=topology.param_count)
    return NetworkParams(topology, values)


def predict(params: NetworkParams, inputs: np.ndarray) -> np.ndarray:
    """Batch forward pass; `inputs` has shape (n, n_inputs)."""
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] != params.topology.n_inputs:
        raise ShapeError(
            f"expected inputs of shape (n, {params.topology.n_inputs}), got {inputs.shape}"
        )
    w_hidden, b_hidden, w_out, b_out = params.unflatten()
    # overflow here is legitimate (diverged parameters); inf propagates to
    # the loss and is handled by the caller
    with np.errstate(over="ignore", invalid="ignore"):
        z1 = inputs @ w_hidden.T + b_hidden
        h = activate(params.topology.hidden_activation, z1)
        z2 = h @ w_out + b_out
        return activate(params.topology.output_activation, z2)


def forward(params: NetworkParams, inputs) -> float:
    """Scalar prediction for a single input vector."""
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 1 or inputs.shape[0] != params.topology.n_inputs:
        raise ShapeError(
            f"expected input vector of length {params.topology.n_inputs}, "
            f"got shape {inputs.shape}"
        )
    return float(predict(params, inputs[None, :])[0])


def mse_loss(params: NetworkParams, inputs: np.ndarray, targets: np.ndarray) -> float:
    """Mean squared error of the network over a batch."""
    pred = predict(params, inputs)
    targets = np.asarray(targets, dtype=np.float64)
    if targets.shape != pred.shape:
        raise ShapeError(f"targets shape {targets.shape} != predictions {pred.shape}")
    with np.errstate(over="ignore", invalid="ignore"):
        diff = pred - targets
        return float(np.mean(diff * diff))


def gradient(params: NetworkParams, inputs: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Gradient of the batch MSE with respect to the flat parameter vector."""
    inputs = np.asarray(inputs, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if inputs.size == 0 or targets.size == 0:
        raise EmptyInputError("gradient requires a non-empty batch")
    if inputs.ndim != 2 or inputs.shape[1] != params.topology.n_inputs:
        raise ShapeError(
            f"expected inputs of shape (n, {params.topology.n_inputs}), got {inputs.shape}"
        )
    if targets.shape != (inputs.shape[0],):
        raise ShapeError(f"targets shape {targets.shape} != ({inputs.shape[0]},)")

    topo = params.topology
    w_hidden, b_hidden, w_out, b_out = params.unflatten()
    n = inputs.shape[0]

    with np.errstate(over="ignore", invalid="ignore"):
        z1 = inputs @ w_hidden.T + b_hidden
        h = activate(topo.hidden_activation, z1)
        z2 = h @ w_out + b_out
        out = activate(topo.output_activation, z2)

        d_out = 2.0 * (out - targets) / n
        d_z2 = d_out * activate_deriv(topo.output_activation, z2)
        g_w_out = d_z2 @ h
        g_b_out = np.sum(d_z2)
        d_h = np.outer(d_z2, w_out)
        d_z1 = d_h * activate_deriv(topo.hidden_activation, z1)
        g_w_hidden = d_z1.T @ inputs
        g_b_hidden = np.sum(d_z1, axis=0)

    return np.concatenate(
        [g_w_hidden.reshape(-1), g_b_hidden, g_w_out, np.atleast_1d(g_b_out)]
    )


@dataclass
class TrainHistory:
    """Per-epoch loss traces of one gradient-descent run."""

    train_losses: list[float] = field(default_factory=list)
    val_losses: list[float] = field(default_factory=list)

    @property
    def stopped_epoch(self) -> int:
        return len(self.train_losses)


def train_backprop(
    params: NetworkParams,
    train: tuple[np.ndarray, np.ndarray],
    val: tuple[np.ndarray, np.ndarray],
    lr: float,
    max_epochs: int,
    patience: int,
) -> tuple[NetworkParams, TrainHistory]:
    """Full-batch gradient descent with early stopping on validation loss.

    Returns the parameters with the lowest validation loss seen, counting
    the starting parameters as the epoch-0 candidate.  Stops once the
    validation loss has failed to improve for more than `patience`
    consecutive epochs (patience 0 stops at the first non-improving epoch).
    """
    if not 0.0 < lr <= 5.0:
        raise ConfigError(f"learning rate must lie in (0, 5], got {lr}")
    if max_epochs < 1:
        raise ConfigError(f"max_epochs must be >= 1, got {max_epochs}")
    if patience < 0:
        raise ConfigError(f"patience must be >= 0, got {patience}")
    x_train, y_train = (np.asarray(a, dtype=np.float64) for a in train)
    x_val, y_val = (np.asarray(a, dtype=np.float64) for a in val)
    if x_train.size == 0 or y_train.size == 0:
        raise EmptyInputError("training set is empty")
    if x_val.size == 0 or y_val.size == 0:
        raise EmptyInputError("validation set is empty")

    best_val = mse_loss(params, x_val, y_val)
    best_values = params.values.copy()
    if not np.isfinite(best_val):
        raise DivergenceError("non-finite validation loss at epoch 0")

    history = TrainHistory()
    values = params.values.copy()
    bad_epochs = 0
    for epoch in range(1, max_epochs + 1):
        current = params.with_values(values)
        values = values - lr * gradient(current, x_train, y_train)
        stepped = params.with_values(values)
        train_loss = mse_loss(stepped, x_train, y_train)
        val_loss = mse_loss(stepped, x_val, y_val)
        if not (np.isfinite(train_loss) and np.isfinite(val_loss)):
            raise DivergenceError(f"non-finite loss at epoch {epoch}")
        history.train_losses.append(train_loss)
        history.val_losses.append(val_loss)
        if val_loss < best_val:
            best_val = val_loss
            best_values = values.copy()
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs > patience:
                break

    return params.with_values(best_values), history
