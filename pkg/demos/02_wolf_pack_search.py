"""Minimize benchmark functions with the wolf-pack optimizer.

The pack's three best members steer every move; the exploration coefficient
decays linearly from 2 to 0 over the run.
"""

import numpy as np

from hybridyield.gwo import GwoConfig, optimize


def sphere(x):
    return float(np.sum(x * x))


def rastrigin(x):
    return float(10 * x.size + np.sum(x * x - 10 * np.cos(2 * np.pi * x)))


for name, fn, bound in (("sphere", sphere, 10.0), ("rastrigin", rastrigin, 5.12)):
    config = GwoConfig(
        pop_size=30,
        num_iter=200,
        lower_bounds=np.full(5, -bound),
        upper_bounds=np.full(5, bound),
        seed=3,
    )
    best, history = optimize(fn, config)
    print(f"{name}: best fitness {best.fitness:.3e} at {np.round(best.position, 4)}")
    marks = [0, 9, 49, 99, 199]
    trace = ", ".join(f"it{m + 1}={history.best_fitness[m]:.2e}" for m in marks)
    print(f"  convergence: {trace}")
