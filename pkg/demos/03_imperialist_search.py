"""Minimize a benchmark with the imperialist-competition optimizer.

Countries form empires around the strongest candidates; colonies assimilate
toward their imperialists, occasional revolutions resample colonies, and
each decade the weakest empire surrenders a colony until one empire remains.
"""

import numpy as np

from hybridyield.ica import IcaConfig, optimize


def sphere(x):
    return float(np.sum(x * x))


config = IcaConfig(
    lower_bounds=np.full(4, -10.0), upper_bounds=np.full(4, 10.0), seed=5
)
best, history = optimize(sphere, config)

print(f"best cost {best.cost:.3e} at {np.round(best.position, 5)}")
print(f"ran {len(history.best_cost)} decades "
      f"(stops when a single empire remains or the budget ends)")

collapse = {}
for decade, count in enumerate(history.empire_count):
    collapse.setdefault(count, decade + 1)
steps = ", ".join(f"{k} by decade {v}" for k, v in sorted(collapse.items(), reverse=True))
print(f"surviving empires: {steps}")
print(f"best-cost trace: start {history.best_cost[0]:.3e}, "
      f"mid {history.best_cost[len(history.best_cost) // 2]:.3e}, "
      f"end {history.best_cost[-1]:.3e}")
