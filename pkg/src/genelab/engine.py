"""The generational loop and its termination conditions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import (
    DEFAULT_MAX_REJECTIONS,
    EvolutionRecord,
    FitnessDatabase,
    Genotype,
    GenotypeDomain,
    RandomSource,
    random_genotype,
)
from .operators import Variation
from .selection import WeightFunction, sus_indices

__all__ = [
    "AllOf",
    "AnyOf",
    "EvolutionConfig",
    "EvolutionResult",
    "MaxIterations",
    "MinimumLocalized",
    "Plateau",
    "TargetFitness",
    "Termination",
    "check_termination",
    "evolve",
    "first_generation",
    "next_generation",
]


class Termination:
    """Predicate on (iteration counter, evolution so far, database)."""

    def __call__(self, iteration: int, evolution: EvolutionRecord, db: FitnessDatabase) -> bool:
        raise NotImplementedError

    def __and__(self, other: Termination) -> AllOf:
        return AllOf((self, other))

    def __or__(self, other: Termination) -> AnyOf:
        return AnyOf((self, other))


@dataclass(frozen=True)
class MaxIterations(Termination):
    limit: int

    def __call__(self, iteration, evolution, db):
        return iteration >= self.limit


@dataclass(frozen=True)
class Plateau(Termination):
    """Best-so-far fitness gained at most ``delta`` over the last ``window`` generations."""

    window: int = 100
    delta: float = 0.0

    def __call__(self, iteration, evolution, db):
        best = evolution.best_so_far
        if len(best) < self.window + 1:
            return False
        return best[-1] - best[-1 - self.window] <= self.delta


@dataclass(frozen=True)
class TargetFitness(Termination):
    """Some valid member seen so far reached ``threshold``."""

    threshold: float

    def __call__(self, iteration, evolution, db):
        best = evolution.best_so_far[-1]
        return best != -math.inf and best >= self.threshold


@dataclass(frozen=True)
class MinimumLocalized(Termination):
    """A member of the latest generation is close to a known optimum.

    Closeness is measured both in fitness (``|f(g) - fitness_at_min| <=
    eps_f``) and in the Euclidean distance to ``x_min`` (``<= eps_x``).
    """

    x_min: tuple
    fitness_at_min: float
    eps_x: float = 1e-2
    eps_f: float = 1e-1

    def distance(self, g: Genotype) -> float:
        return math.sqrt(sum((x - y) ** 2 for x, y in zip(g.values, self.x_min)))

    def matches(self, g: Genotype, fitness: float) -> bool:
        return abs(fitness - self.fitness_at_min) <= self.eps_f and self.distance(g) <= self.eps_x

    def __call__(self, iteration, evolution, db):
        target, eps_f = self.fitness_at_min, self.eps_f
        for g, f in zip(evolution.latest, evolution.latest_fitness):
            if abs(f - target) <= eps_f and self.distance(g) <= self.eps_x:
                return True
        return False


@dataclass(frozen=True)
class AllOf(Termination):
    conditions: tuple

    def __call__(self, iteration, evolution, db):
        return all(t(iteration, evolution, db) for t in self.conditions)


@dataclass(frozen=True)
class AnyOf(Termination):
    conditions: tuple

    def __call__(self, iteration, evolution, db):
        return any(t(iteration, evolution, db) for t in self.conditions)


def check_termination(
    t: Termination, iteration: int, evolution: EvolutionRecord, db: FitnessDatabase
) -> bool:
    return t(iteration, evolution, db)


@dataclass
class EvolutionConfig:
    """Parameters of one evolution.

    ``two_k`` parents are drawn per generation and split into consecutive
    tuples of ``variation.n_in``; the offspring size is
    ``two_k / n_in * variation.n_out``. ``survivor_weights`` defaults to
    the parent weight function.
    """

    mu: int
    two_k: int
    variation: Variation
    parent_weights: WeightFunction
    termination: Termination
    survivor_weights: WeightFunction | None = None
    seed: int = 0
    keep_history: bool = True
    max_rejections: int = DEFAULT_MAX_REJECTIONS

    def __post_init__(self):
        if self.mu < 1:
            raise ValueError("generation size must be positive")
        if self.two_k < 1 or self.two_k % self.variation.n_in:
            raise ValueError(
                f"parent count {self.two_k} is not a positive multiple of the "
                f"variation arity {self.variation.n_in}"
            )
        if self.survivor_weights is None:
            self.survivor_weights = self.parent_weights

    @property
    def offspring_size(self) -> int:
        return self.two_k // self.variation.n_in * self.variation.n_out


@dataclass
class EvolutionResult:
    evolution: EvolutionRecord
    db: FitnessDatabase
    iterations: int

    def __iter__(self):
        return iter((self.evolution, self.db, self.iterations))


def first_generation(
    cfg: EvolutionConfig, domain: GenotypeDomain, rng: RandomSource
) -> list[Genotype]:
    return [random_genotype(domain, rng, cfg.max_rejections) for _ in range(cfg.mu)]


def _step(
    current: list[Genotype],
    fitness: list[float],
    cfg: EvolutionConfig,
    db: FitnessDatabase,
    rng: RandomSource,
) -> tuple[list[Genotype], list[float]]:
    picks = sus_indices(cfg.parent_weights(fitness), cfg.two_k, rng)
    parents = [current[i] for i in picks]
    n = cfg.variation.n_in
    vary = cfg.variation.apply
    offspring: list[Genotype] = []
    for j in range(0, len(parents), n):
        offspring.extend(vary(parents[j : j + n], rng))
    pool = current + offspring
    pool_fitness = fitness + db.many(offspring)
    chosen = sus_indices(cfg.survivor_weights(pool_fitness), cfg.mu, rng)
    return [pool[i] for i in chosen], [pool_fitness[i] for i in chosen]


def next_generation(
    current: Sequence[Genotype],
    cfg: EvolutionConfig,
    db: FitnessDatabase,
    rng: RandomSource,
) -> list[Genotype]:
    """Parent selection, variation of consecutive tuples, survivor selection."""
    current = list(current)
    return _step(current, db.many(current), cfg, db, rng)[0]


def evolve(
    cfg: EvolutionConfig,
    domain: GenotypeDomain,
    objective: Callable[[tuple], float] | FitnessDatabase,
    rng: RandomSource | None = None,
) -> EvolutionResult:
    """Run the loop until the termination predicate holds.

    The predicate is checked after the initial generation and after every
    step. ``objective`` may be a ready database, e.g. to share or
    instrument it.
    """
    db = objective if isinstance(objective, FitnessDatabase) else FitnessDatabase(objective)
    rng = RandomSource(cfg.seed) if rng is None else rng
    current = first_generation(cfg, domain, rng)
    fitness = db.many(current)
    evolution = EvolutionRecord(cfg.keep_history)
    evolution.append(current, fitness)
    iteration = 0
    stop = cfg.termination
    while not stop(iteration, evolution, db):
        current, fitness = _step(current, fitness, cfg, db, rng)
        evolution.append(current, fitness)
        iteration += 1
    return EvolutionResult(evolution, db, iteration)
