"""Train the single-hidden-layer network by backpropagation.

Fits a noisy quadratic with early stopping and shows that the analytic
gradient agrees with central finite differences.
"""

import numpy as np

from hybridyield.network import (
    Activation,
    NetworkTopology,
    gradient,
    init_params,
    mse_loss,
    predict,
    train_backprop,
)

rng = np.random.default_rng(0)
x = rng.uniform(-1, 1, size=(120, 2))
y = x[:, 0] ** 2 - 0.5 * x[:, 1] + 0.1 * rng.normal(size=120)
x_train, y_train = x[:90], y[:90]
x_val, y_val = x[90:], y[90:]

topology = NetworkTopology(2, 8, Activation.TANH, Activation.IDENTITY)
params = init_params(topology, seed=1, scale=0.5)
print(f"topology: {topology.n_inputs} -> {topology.n_hidden} -> 1, "
      f"{topology.param_count} parameters")

# spot-check the analytic gradient against finite differences
g = gradient(params, x_train, y_train)
step = 1e-6
i = 7
up, down = params.values.copy(), params.values.copy()
up[i] += step
down[i] -= step
fd = (mse_loss(params.with_values(up), x_train, y_train)
      - mse_loss(params.with_values(down), x_train, y_train)) / (2 * step)
print(f"gradient[{i}] = {g[i]:+.8f}, finite difference = {fd:+.8f}")

fitted, history = train_backprop(
    params, (x_train, y_train), (x_val, y_val), lr=0.5, max_epochs=2000, patience=100
)
print(f"stopped after {history.stopped_epoch} epochs")
print(f"training loss: {history.train_losses[0]:.4f} -> {history.train_losses[-1]:.4f}")
print(f"validation loss at best epoch: {min(history.val_losses):.4f}")
print("sample predictions vs targets:")
for xi, yi in zip(x_val[:5], y_val[:5]):
    print(f"  f({xi[0]:+.2f}, {xi[1]:+.2f}) = {predict(fitted, xi[None, :])[0]:+.3f}"
          f"   target {yi:+.3f}")
