"""Constraint-aware genetic algorithm with a test-function tuning harness."""

from .core import (
    INVALID,
    FitnessDatabase,
    GeneDomain,
    Genotype,
    GenotypeDomain,
    RandomSource,
    Representation,
    Validity,
    flatten,
    random_genotype,
    validate,
)
from .engine import (
    AllOf,
    AnyOf,
    EvolutionConfig,
    MaxIterations,
    MinimumLocalized,
    Plateau,
    TargetFitness,
    evolve,
)
from .selection import FPS, ExponentialRanking, LinearRanking

__version__ = "0.1.0"
