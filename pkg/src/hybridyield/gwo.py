"""Grey Wolf Optimizer over a bounded box of real vectors.

The three best candidates (alpha, beta, delta) jointly steer every position
update.  Each wolf moves to the average of three candidate positions, one
computed against each leader with fresh coefficient draws:

    a(t)  = 2 - t * (2 / num_iter)          linear decay, 2 -> 0
    A     = 2a * r1 - a,   C = 2 * r2       r1, r2 ~ U[0,1] per component
    D_L   = |C * X_L - X|                   distance to leader L
    X_L'  = X_L - A * D_L                   candidate against leader L
    X(t+1) = (X_alpha' + X_beta' + X_delta') / 3, clamped to the box

Per update the generator is consumed in a fixed order: r1 then r2, for the
alpha, then beta, then delta leader.  Runs are reproducible from the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, ShapeError


@dataclass(frozen=True)
class Wolf:
    """Candidate solution: a position vector and its fitness (lower is better)."""

    position: np.ndarray
    fitness: float


@dataclass(frozen=True)
class LeaderTriplet:
    """Snapshot of the three best wolves, ordered by fitness."""

    alpha: Wolf
    beta: Wolf
    delta: Wolf


@dataclass
class GwoConfig:
    pop_size: int = 30
    num_iter: int = 200
    lower_bounds: np.ndarray | None = None
    upper_bounds: np.ndarray | None = None
    seed: int = 0

    def validate(self) -> None:
        if self.pop_size < 3:
            raise ConfigError(f"pop_size must be >= 3, got {self.pop_size}")
        # num_iter 0 is allowed: evaluate the initial pack and return its best.
        if self.num_iter < 0:
            raise ConfigError(f"num_iter must be >= 0, got {self.num_iter}")
        if self.lower_bounds is None or self.upper_bounds is None:
            raise ConfigError("bounds must be provided")
        lo = np.asarray(self.lower_bounds, dtype=np.float64)
        hi = np.asarray(self.upper_bounds, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ConfigError(f"bound shapes differ: {lo.shape} vs {hi.shape}")
        if not np.all(lo < hi):
            raise ConfigError("lower bounds must be strictly below upper bounds")


@dataclass
class GwoHistory:
    """Best-so-far fitness after each iteration's evaluation pass."""

    best_fitness: list[float] = field(default_factory=list)
    best: Wolf | None = None


def coefficient_a(t: int, num_iter: int) -> float:
    """Linear decay 2 -> 0 over the run (a = 2 - t * 2/num_iter)."""
    if num_iter == 0:
        raise ConfigError("num_iter must be nonzero to evaluate the decay")
    if not 0 <= t <= num_iter:
        raise ConfigError(f"iteration index {t} outside [0, {num_iter}]")
    return 2.0 - t * (2.0 / num_iter)


def sample_coefficients(a: float, dim: int, rng: np.random.Generator):
    """Draw one (A, C) coefficient pair of dimension `dim`.

    Consumes the generator in the fixed order r1 then r2, so a scripted
    generator can replay a transcript.  A lands in [-a, a], C in [0, 2].
    """
    r1 = rng.random(dim)
    r2 = rng.random(dim)
    A = 2.0 * a * r1 - a
    C = 2.0 * r2
    return A, C


def leader_distance(C: np.ndarray, leader_pos: np.ndarray, wolf_pos: np.ndarray) -> np.ndarray:
    """Componentwise encircling distance |C * X_leader - X_wolf|."""
    C = np.asarray(C, dtype=np.float64)
    leader_pos = np.asarray(leader_pos, dtype=np.float64)
    wolf_pos = np.asarray(wolf_pos, dtype=np.float64)
    if not (C.shape == leader_pos.shape == wolf_pos.shape):
        raise ShapeError(
            f"mismatched shapes: C {C.shape}, leader {leader_pos.shape}, wolf {wolf_pos.shape}"
        )
    return np.abs(C * leader_pos - wolf_pos)


def candidate_position(leader_pos: np.ndarray, A: np.ndarray, D: np.ndarray) -> np.ndarray:
    """Candidate step away from a leader: X_leader - A * D."""
    leader_pos = np.asarray(leader_pos, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    D = np.asarray(D, dtype=np.float64)
    if not (leader_pos.shape == A.shape == D.shape):
        raise ShapeError(
            f"mismatched shapes: leader {leader_pos.shape}, A {A.shape}, D {D.shape}"
        )
    return leader_pos - A * D


def update_position(
    wolf: Wolf,
    leaders: LeaderTriplet,
    a: float,
    rng: np.random.Generator,
    lower: np.ndarray,
    upper: np.ndarray,
) -> np.ndarray:
    """One full position update against the frozen leader triplet.

    Draws an independent (A, C) pair per leader, in alpha/beta/delta order,
    averages the three candidates, and clamps the result to the box.
    """
    dim = wolf.position.shape[0]
    candidates = []
    for leader in (leaders.alpha, leaders.beta, leaders.delta):
        A, C = sample_coefficients(a, dim, rng)
        D = leader_distance(C, leader.position, wolf.position)
        candidates.append(candidate_position(leader.position, A, D))
    new_pos = (candidates[0] + candidates[1] + candidates[2]) / 3.0
    return np.clip(new_pos, lower, upper)


def rank_pack(positions: np.ndarray, fitness: np.ndarray) -> LeaderTriplet:
    """Leader triplet from the current pack (stable sort, copies taken)."""
    order = np.argsort(fitness, kind="stable")
    wolves = [
        Wolf(positions[order[k]].copy(), float(fitness[order[k]])) for k in range(3)
    ]
    return LeaderTriplet(*wolves)


def _safe_fitness(fn: Callable[[np.ndarray], float], position: np.ndarray) -> float:
    value = float(fn(position))
    return value if np.isfinite(value) else float("inf")


def optimize(
    fitness: Callable[[np.ndarray], float], config: GwoConfig
) -> tuple[Wolf, GwoHistory]:
    """Run the optimizer and return the best-ever wolf with its history.

    Each iteration evaluates the pack, refreshes the leader snapshot, records
    the elitist best-so-far, then moves every wolf against the snapshot.
    Candidates with non-finite fitness are treated as +inf and the run
    continues.  With num_iter 0 the initial pack is evaluated once and its
    best member returned.
    """
    config.validate()
    lower = np.asarray(config.lower_bounds, dtype=np.float64)
    upper = np.asarray(config.upper_bounds, dtype=np.float64)
    dim = lower.shape[0]
    rng = np.random.default_rng(config.seed)

    positions = rng.uniform(lower, upper, size=(config.pop_size, dim))
    history = GwoHistory()
    best: Wolf | None = None

    if config.num_iter == 0:
        values = np.array([_safe_fitness(fitness, p) for p in positions])
        best_i = int(np.argmin(values))
        best = Wolf(positions[best_i].copy(), float(values[best_i]))
        history.best = best
        return best, history

    for t in range(config.num_iter):
        values = np.array([_safe_fitness(fitness, p) for p in positions])
        leaders = rank_pack(positions, values)
        if best is None or leaders.alpha.fitness < best.fitness:
            best = leaders.alpha
        history.best_fitness.append(best.fitness)

        a = coefficient_a(t, config.num_iter)
        for i in range(config.pop_size):
            wolf = Wolf(positions[i], values[i])
            positions[i] = update_position(wolf, leaders, a, rng, lower, upper)

    history.best = best
    return best, history
