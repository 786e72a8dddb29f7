"""Selection probability functions and sampling algorithms.

Weight functions take the extended fitness of every member, in member
order, and return one probability per member. Members with ``-inf``
fitness always get weight 0 and never enter any sum.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import FitnessDatabase, Genotype, RandomSource, flatten

__all__ = [
    "FPS",
    "ExponentialRanking",
    "LinearRanking",
    "NoValidGenotype",
    "exponential_rank_weights",
    "filter_population",
    "fps_weights",
    "generational_select",
    "linear_rank_weights",
    "ranking_weights",
    "roulette_wheel",
    "select_from_generations",
    "sort_by_fitness",
    "sus_indices",
    "sus_select",
]

WeightFunction = Callable[[Sequence[float]], list]


class NoValidGenotype(ValueError):
    """No member satisfies the predicate; the problem must be reformulated."""


_NEG_INF = -math.inf


def _valid(f: float) -> bool:
    return f != _NEG_INF


def fps_weights(fitness: Sequence[float]) -> list[float]:
    """Fitness-proportional weights with windowing.

    The minimum valid fitness is subtracted and ``1/mu_q`` added, where
    ``mu_q`` counts valid members. The denominator ``1 + sum(f - f_min)``
    is the algebraic form of ``1 - mu_q * f_min + sum(f)`` that does not
    cancel catastrophically when all fitnesses are large.
    """
    valid = [f for f in fitness if f != _NEG_INF]
    if not valid:
        raise NoValidGenotype("fitness proportional selection needs a feasible member")
    f_min = min(valid)
    eps = 1.0 / len(valid)
    total = 1.0 + math.fsum(f - f_min for f in valid)
    return [(f - f_min + eps) / total if f != _NEG_INF else 0.0 for f in fitness]


def linear_rank_weights(mu_q: int, s: float = 2.0) -> list[float]:
    """Weights of ranks 0 (worst) .. mu_q - 1 (best) under linear pressure ``s``."""
    if not 1.0 < s <= 2.0:
        raise ValueError(f"linear ranking pressure must satisfy 1 < s <= 2, got {s}")
    if mu_q == 1:
        return [1.0]
    a = (2.0 - s) / mu_q
    b = 2.0 * (s - 1.0) / (mu_q * (mu_q - 1))
    return [a + b * j for j in range(mu_q)]


def exponential_rank_weights(mu_q: int) -> list[float]:
    """Weights of ranks 0 (worst) .. mu_q - 1 (best) proportional to ``1 - e^-j``."""
    if mu_q == 1:
        return [1.0]
    e = math.e
    norm = (1.0 - e) / (mu_q * (1.0 - e) + e - math.exp(1.0 - mu_q))
    return [norm * -math.expm1(-j) for j in range(mu_q)]


def sort_by_fitness(fitness: Sequence[float]) -> list[int]:
    """Indices of a stable ascending sort by extended fitness."""
    return sorted(range(len(fitness)), key=fitness.__getitem__)


def ranking_weights(
    fitness: Sequence[float],
    pressure: str = "linear",
    s: float = 2.0,
) -> list[float]:
    """Rank-based weights, returned in the caller's member order.

    Ties are broken by member index, so equally fit members get distinct
    weights.
    """
    order = sort_by_fitness(fitness)
    mu_q = len(fitness) - fitness.count(_NEG_INF) if isinstance(fitness, list) else sum(
        1 for f in fitness if f != _NEG_INF
    )
    if mu_q == 0:
        raise NoValidGenotype("ranking selection needs a feasible member")
    if pressure == "linear":
        ranks = linear_rank_weights(mu_q, s)
    elif pressure == "exponential":
        ranks = exponential_rank_weights(mu_q)
    else:
        raise ValueError(f"unknown ranking pressure {pressure!r}")
    weights = [0.0] * len(fitness)
    # Invalid members sort first; the valid ones follow in rank order.
    for idx, r in zip(order[len(fitness) - mu_q:], ranks):
        weights[idx] = r
    return weights


@dataclass(frozen=True)
class FPS:
    name = "fps"

    def __call__(self, fitness: Sequence[float]) -> list[float]:
        return fps_weights(fitness)


@dataclass(frozen=True)
class LinearRanking:
    s: float = 2.0

    def __post_init__(self):
        if not 1.0 < self.s <= 2.0:
            raise ValueError(f"linear ranking pressure must satisfy 1 < s <= 2, got {self.s}")

    @property
    def name(self) -> str:
        return "lin-rs" if self.s == 2.0 else f"lin-rs({self.s:g})"

    def __call__(self, fitness: Sequence[float]) -> list[float]:
        return ranking_weights(fitness, "linear", self.s)


@dataclass(frozen=True)
class ExponentialRanking:
    name = "exp-rs"

    def __call__(self, fitness: Sequence[float]) -> list[float]:
        return ranking_weights(fitness, "exponential")


def filter_population(population: Sequence[Genotype], predicate) -> list[Genotype]:
    return [g for g in population if predicate(g)]


def _last_positive(weights: Sequence[float]) -> int:
    for i in range(len(weights) - 1, -1, -1):
        if weights[i] > 0:
            return i
    raise ValueError("weight vector has no positive entry")


def roulette_wheel(
    population: Sequence[Genotype],
    weights: Sequence[float],
    rng: RandomSource,
) -> Genotype:
    """Single-arm wheel: the member whose cumulative cell contains ``U(0, 1)``."""
    cum = list(itertools.accumulate(weights))
    i = bisect.bisect_right(cum, rng.random())
    if i >= len(cum):
        i = _last_positive(weights)
    return population[i]


def sus_indices(weights: Sequence[float], mu: int, rng: RandomSource) -> list[int]:
    """Member indices hit by ``mu`` equidistant arms after one spin.

    Cells are half-open ``[c_{i-1}, c_i)``; an arm beyond the last
    cumulative value (roundoff) falls to the last positive-weight member.
    """
    if mu < 1:
        raise ValueError("number of arms must be positive")
    cum = list(itertools.accumulate(weights))
    n = len(cum)
    u = rng.random()
    out = []
    i = 0
    last = None
    for j in range(mu):
        arm = (u + j) / mu
        while i < n and cum[i] <= arm:
            i += 1
        if i < n:
            out.append(i)
        else:
            if last is None:
                last = _last_positive(weights)
            out.append(last)
    return out


def sus_select(
    population: Sequence[Genotype],
    weights: Sequence[float],
    mu: int,
    rng: RandomSource,
) -> list[Genotype]:
    """Stochastic universal sampling of ``mu`` members, in arm order."""
    return [population[i] for i in sus_indices(weights, mu, rng)]


def generational_select(current: Sequence[Genotype], offspring: Sequence[Genotype]) -> list[Genotype]:
    if len(current) != len(offspring):
        raise ValueError(
            f"generational selection needs equal sizes, got {len(current)} and {len(offspring)}"
        )
    return list(offspring)


def select_from_generations(
    generations: Sequence[Sequence[Genotype]],
    weight_fn: WeightFunction,
    mu: int,
    rng: RandomSource,
    db: FitnessDatabase,
) -> list[Genotype]:
    """Flatten the generations, weight the concatenation and SUS-select ``mu``."""
    pool = flatten(generations)
    return sus_select(pool, weight_fn(db.many(pool)), mu, rng)
