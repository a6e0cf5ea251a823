"""Imperialist Competitive Algorithm over a bounded box of real vectors.

Candidate solutions ("countries") are grouped into empires, each led by its
best member (the imperialist).  One decade applies, per empire: assimilation
(colonies move toward their imperialist), revolution (random resampling of a
fraction of colonies), re-evaluation, and a role swap whenever a colony
overtakes its imperialist.  Empires then compete: the weakest empire loses
its weakest colony to a roulette-selected rival, and an empire with no
colonies left is dissolved into the winner.  The run stops when one empire
remains or the decade budget is spent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Country:
    """Candidate solution: a position vector and its cost (lower is better)."""

    position: np.ndarray
    cost: float


@dataclass
class Empire:
    imperialist: Country
    colonies: list[Country]


@dataclass
class IcaConfig:
    n_countries: int = 50
    n_imperialists: int = 5
    assimilation_coeff: float = 2.0
    revolution_rate: float = 0.1
    revolution_damp: float = 0.93
    colony_weight: float = 0.1
    max_decades: int = 200
    lower_bounds: np.ndarray | None = None
    upper_bounds: np.ndarray | None = None
    seed: int = 0

    def validate(self) -> None:
        if not 1 <= self.n_imperialists < self.n_countries:
            raise ConfigError(
                f"need 1 <= n_imperialists < n_countries, got "
                f"{self.n_imperialists} vs {self.n_countries}"
            )
        if self.assimilation_coeff <= 0:
            raise ConfigError(f"assimilation_coeff must be > 0, got {self.assimilation_coeff}")
        if not 0.0 <= self.revolution_rate <= 1.0:
            raise ConfigError(f"revolution_rate must lie in [0, 1], got {self.revolution_rate}")
        if not 0.0 < self.revolution_damp <= 1.0:
            raise ConfigError(f"revolution_damp must lie in (0, 1], got {self.revolution_damp}")
        if not 0.0 <= self.colony_weight <= 1.0:
            raise ConfigError(f"colony_weight must lie in [0, 1], got {self.colony_weight}")
        if self.max_decades < 0:
            raise ConfigError(f"max_decades must be >= 0, got {self.max_decades}")
        if self.lower_bounds is None or self.upper_bounds is None:
            raise ConfigError("bounds must be provided")
        lo = np.asarray(self.lower_bounds, dtype=np.float64)
        hi = np.asarray(self.upper_bounds, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ConfigError(f"bound shapes differ: {lo.shape} vs {hi.shape}")
        if not np.all(lo < hi):
            raise ConfigError("lower bounds must be strictly below upper bounds")


@dataclass
class IcaHistory:
    """Per-decade traces: elitist best cost and surviving empire count."""

    best_cost: list[float] = field(default_factory=list)
    empire_count: list[int] = field(default_factory=list)
    best: Country | None = None


def form_empires(
    countries: list[Country], n_imperialists: int, rng: np.random.Generator
) -> list[Empire]:
    """Group countries into initial empires.

    The lowest-cost countries become imperialists.  Colonies are apportioned
    proportionally to imperialist power (worst cost in the pool minus the
    imperialist's cost) using largest-remainder rounding; remainder seats and
    ties go to the stronger imperialist.  Colony identities are assigned by a
    seeded shuffle.
    """
    if n_imperialists >= len(countries):
        raise ConfigError(
            f"n_imperialists {n_imperialists} must be below country count {len(countries)}"
        )
    ranked = sorted(countries, key=lambda c: c.cost)
    imperialists = ranked[:n_imperialists]
    colonies = ranked[n_imperialists:]

    # power is measured against the worst finite cost in the pool; a pool of
    # all-infinite costs (every candidate penalized) apportions uniformly
    finite = [c.cost for c in countries if np.isfinite(c.cost)]
    if finite and all(np.isfinite(imp.cost) for imp in imperialists):
        max_cost = max(finite)
        power = np.array([max_cost - imp.cost for imp in imperialists], dtype=np.float64)
    else:
        power = np.ones(len(imperialists))
    if power.sum() <= 0.0:
        power = np.ones_like(power)
    quotas = len(colonies) * power / power.sum()
    counts = np.floor(quotas).astype(int)
    fractions = quotas - counts
    # stable argsort on -fraction leaves ties in imperialist-strength order
    for idx in np.argsort(-fractions, kind="stable")[: len(colonies) - counts.sum()]:
        counts[idx] += 1

    shuffled = [colonies[i] for i in rng.permutation(len(colonies))]
    empires = []
    start = 0
    for imp, n in zip(imperialists, counts):
        empires.append(Empire(imp, shuffled[start : start + n]))
        start += n
    return empires


def assimilate(
    empire: Empire, beta: float, rng: np.random.Generator, lower: np.ndarray, upper: np.ndarray
) -> Empire:
    """Move every colony toward its imperialist.

    Each component steps by u * beta * (imperialist - colony) with a fresh
    u ~ U[0,1] per component; results are clamped to the box.  Costs are left
    untouched and must be re-evaluated by the caller.
    """
    if beta <= 0:
        raise ConfigError(f"assimilation coefficient must be > 0, got {beta}")
    imp_pos = empire.imperialist.position
    moved = []
    for colony in empire.colonies:
        u = rng.random(imp_pos.shape[0])
        new_pos = colony.position + u * beta * (imp_pos - colony.position)
        moved.append(Country(np.clip(new_pos, lower, upper), colony.cost))
    return Empire(empire.imperialist, moved)


def revolve(
    empire: Empire, rate: float, rng: np.random.Generator, lower: np.ndarray, upper: np.ndarray
) -> Empire:
    """Resample each colony uniformly inside the box with probability `rate`."""
    if not 0.0 <= rate <= 1.0:
        raise ConfigError(f"revolution rate must lie in [0, 1], got {rate}")
    colonies = []
    for colony in empire.colonies:
        if rng.random() < rate:
            colonies.append(Country(rng.uniform(lower, upper), colony.cost))
        else:
            colonies.append(colony)
    return Empire(empire.imperialist, colonies)


def swap_if_better(empire: Empire) -> Empire:
    """Exchange roles when a colony beats the imperialist.

    The best strictly-better colony takes over; ties between colonies go to
    the first in stored order.  The deposed imperialist becomes a colony in
    the vacated slot.
    """
    if not empire.colonies:
        return empire
    costs = [c.cost for c in empire.colonies]
    best_i = int(np.argmin(costs))
    if costs[best_i] >= empire.imperialist.cost:
        return empire
    colonies = list(empire.colonies)
    new_imperialist = colonies[best_i]
    colonies[best_i] = empire.imperialist
    return Empire(new_imperialist, colonies)


def empire_total_cost(empire: Empire, colony_weight: float) -> float:
    """Imperialist cost plus a weighted mean of colony costs.

    Lower total cost means a more powerful empire.  An empire without
    colonies is costed on its imperialist alone.
    """
    if not empire.colonies:
        return empire.imperialist.cost
    return empire.imperialist.cost + colony_weight * float(
        np.mean([c.cost for c in empire.colonies])
    )


def _roulette(powers: np.ndarray, rng: np.random.Generator) -> int:
    powers = np.asarray(powers, dtype=np.float64)
    # infinite powers (rivals of an infinitely costed empire) count as the
    # strongest finite power; an all-equal or degenerate field is uniform
    finite = powers[np.isfinite(powers)]
    cap = float(finite.max()) if finite.size else 1.0
    powers = np.where(np.isfinite(powers), powers, max(cap, 1.0))
    total = powers.sum()
    if not np.isfinite(total) or total <= 0.0:
        powers = np.ones_like(powers)
        total = powers.sum()
    idx = int(np.searchsorted(np.cumsum(powers / total), rng.random(), side="right"))
    return min(idx, len(powers) - 1)


def compete(
    empires: list[Empire], rng: np.random.Generator, colony_weight: float = 0.1
) -> list[Empire]:
    """One imperialistic competition step.

    The weakest empire (highest total cost, ties to the first in list order)
    surrenders its weakest colony to a rival chosen by roulette over
    normalized powers.  A weakest empire left with no colonies, whether it
    arrived empty or just lost its last colony, is dissolved: its imperialist
    joins the winner as a colony.  Country count is conserved.
    """
    if len(empires) < 2:
        return empires

    totals = np.array([empire_total_cost(e, colony_weight) for e in empires])
    weakest = int(np.argmax(totals))
    rivals = [i for i in range(len(empires)) if i != weakest]
    with np.errstate(invalid="ignore"):  # inf - inf when several empires diverged
        powers = np.array([totals[weakest] - totals[i] for i in rivals])
    winner = rivals[_roulette(powers, rng)]

    result = [Empire(e.imperialist, list(e.colonies)) for e in empires]
    if result[weakest].colonies:
        costs = [c.cost for c in result[weakest].colonies]
        lost = result[weakest].colonies.pop(int(np.argmax(costs)))
        result[winner].colonies.append(lost)
    if not result[weakest].colonies:
        result[winner].colonies.append(result[weakest].imperialist)
        del result[weakest]
    return result


def _safe_cost(fn: Callable[[np.ndarray], float], position: np.ndarray) -> float:
    value = float(fn(position))
    return value if np.isfinite(value) else float("inf")


def optimize(
    fitness: Callable[[np.ndarray], float], config: IcaConfig
) -> tuple[Country, IcaHistory]:
    """Run the algorithm and return the best-ever country with its history.

    Decades iterate {assimilate, revolve, re-evaluate, swap, compete} until a
    single empire remains or `max_decades` is reached.  The revolution rate
    is damped by `revolution_damp` each decade so that late decades settle
    into a persistent power ordering and empires can actually collapse.
    Non-finite costs are treated as +inf.  With max_decades 0 the best
    initial country is returned.
    """
    config.validate()
    lower = np.asarray(config.lower_bounds, dtype=np.float64)
    upper = np.asarray(config.upper_bounds, dtype=np.float64)
    rng = np.random.default_rng(config.seed)

    countries = [
        Country(p, _safe_cost(fitness, p))
        for p in rng.uniform(lower, upper, size=(config.n_countries, lower.shape[0]))
    ]
    best = min(countries, key=lambda c: c.cost)
    history = IcaHistory()
    empires = form_empires(countries, config.n_imperialists, rng)

    rate = config.revolution_rate
    for _ in range(config.max_decades):
        if len(empires) == 1:
            break
        stepped = []
        for empire in empires:
            empire = assimilate(empire, config.assimilation_coeff, rng, lower, upper)
            empire = revolve(empire, rate, rng, lower, upper)
            empire = Empire(
                empire.imperialist,
                [Country(c.position, _safe_cost(fitness, c.position)) for c in empire.colonies],
            )
            empire = swap_if_better(empire)
            if empire.imperialist.cost < best.cost:
                best = empire.imperialist
            stepped.append(empire)
        empires = compete(stepped, rng, config.colony_weight)
        rate *= config.revolution_damp
        history.best_cost.append(best.cost)
        history.empire_count.append(len(empires))

    history.best = best
    return best, history
