"""Genotypes, domains, populations, extended fitness and randomness.

Values of a genotype are stored as a plain tuple. Fitness is maximized
everywhere in the package; infeasible genotypes get ``INVALID`` (``-inf``),
which selection code never lets into sums.
"""

from __future__ import annotations

import enum
import itertools
import math
import struct
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "INVALID",
    "DomainError",
    "EvolutionRecord",
    "FitnessDatabase",
    "GeneDomain",
    "GeneKind",
    "Genotype",
    "GenotypeDomain",
    "ObjectiveError",
    "Population",
    "RandomSource",
    "RejectionBudgetExhausted",
    "Representation",
    "Validity",
    "flatten",
    "random_genotype",
    "validate",
]

#: Extended fitness of a genotype that violates the domain predicate.
INVALID = -math.inf

DEFAULT_MAX_REJECTIONS = 10**6


class DomainError(ValueError):
    """Malformed domain, or a genotype that does not fit its domain."""


class RejectionBudgetExhausted(RuntimeError):
    """Raised when rejection sampling could not satisfy the predicate."""


class ObjectiveError(ArithmeticError):
    """The objective returned a non-finite value for a feasible genotype."""


class GeneKind(enum.Enum):
    REAL = "real"
    INTEGER = "integer"
    BOOLEAN = "boolean"
    SLOT = "permutation-slot"


class Representation(enum.Enum):
    BINARY = "binary"
    FLOAT = "floating-point"
    INTEGER = "integer"
    PERMUTATION = "permutation"


_KIND_OF = {
    Representation.BINARY: GeneKind.BOOLEAN,
    Representation.FLOAT: GeneKind.REAL,
    Representation.INTEGER: GeneKind.INTEGER,
    Representation.PERMUTATION: GeneKind.SLOT,
}


class Validity(enum.Enum):
    IN_G = "in-G"
    IN_BOX_NOT_G = "in-box-not-G"
    OUT_OF_BOX = "out-of-box"


@dataclass(frozen=True)
class GeneDomain:
    """Bounded set a single gene is drawn from.

    Booleans use ``low=False, high=True``; a permutation slot over ``c``
    loci is the integer range ``[0, c - 1]``.
    """

    kind: GeneKind
    low: float | int | bool = 0
    high: float | int | bool = 0

    def __post_init__(self) -> None:
        if self.kind is GeneKind.BOOLEAN:
            object.__setattr__(self, "low", False)
            object.__setattr__(self, "high", True)
            return
        if not (math.isfinite(self.low) and math.isfinite(self.high)):
            raise DomainError(f"unbounded gene domain [{self.low}, {self.high}]")
        if self.low > self.high:
            raise DomainError(f"empty gene domain [{self.low}, {self.high}]")
        if self.kind is not GeneKind.REAL and (
            int(self.low) != self.low or int(self.high) != self.high
        ):
            raise DomainError("integer gene bounds must be integers")

    @classmethod
    def real(cls, low: float, high: float) -> GeneDomain:
        return cls(GeneKind.REAL, float(low), float(high))

    @classmethod
    def integer(cls, low: int, high: int) -> GeneDomain:
        return cls(GeneKind.INTEGER, int(low), int(high))

    @classmethod
    def boolean(cls) -> GeneDomain:
        return cls(GeneKind.BOOLEAN)

    @classmethod
    def slot(cls, c: int) -> GeneDomain:
        return cls(GeneKind.SLOT, 0, int(c) - 1)

    @property
    def width(self) -> float:
        return self.high - self.low

    def contains(self, x) -> bool:
        if self.kind is GeneKind.BOOLEAN:
            return isinstance(x, (bool, np.bool_))
        if self.kind is not GeneKind.REAL and int(x) != x:
            return False
        return self.low <= x <= self.high

    def draw(self, rng: RandomSource):
        """Draw a value from the uniform distribution over this set."""
        if self.kind is GeneKind.REAL:
            return rng.uniform(self.low, self.high)
        if self.kind is GeneKind.BOOLEAN:
            return rng.boolean()
        return rng.integer(self.low, self.high)


def _all_distinct(values: Sequence) -> bool:
    return len(set(values)) == len(values)


class GenotypeDomain:
    """Product of gene domains restricted by a predicate.

    The predicate receives the value tuple. For the permutation
    representation the all-distinct condition is always enforced, in
    addition to any user predicate.
    """

    def __init__(
        self,
        genes: Sequence[GeneDomain],
        representation: Representation,
        predicate: Callable[[tuple], bool] | None = None,
    ):
        genes = tuple(genes)
        if not genes:
            raise DomainError("genotype length must be at least 1")
        kind = _KIND_OF[representation]
        if any(g.kind is not kind for g in genes):
            raise DomainError(
                f"{representation.value} representation needs {kind.value} genes only"
            )
        if representation is Representation.PERMUTATION:
            expected = GeneDomain.slot(len(genes))
            if any(g != expected for g in genes):
                raise DomainError("permutation genes must all be slots over the loci")
        self.genes = genes
        self.representation = representation
        self.user_predicate = predicate
        self.lows = tuple(g.low for g in genes)
        self.highs = tuple(g.high for g in genes)
        if representation is Representation.FLOAT:
            self._pack = struct.Struct(f"<{len(genes)}d").pack
        else:
            self._pack = None

    @classmethod
    def floating(cls, bounds: Iterable[tuple[float, float]], predicate=None) -> GenotypeDomain:
        return cls([GeneDomain.real(a, b) for a, b in bounds], Representation.FLOAT, predicate)

    @classmethod
    def box(cls, low: float, high: float, c: int, predicate=None) -> GenotypeDomain:
        return cls.floating([(low, high)] * c, predicate)

    @classmethod
    def integers(cls, bounds: Iterable[tuple[int, int]], predicate=None) -> GenotypeDomain:
        return cls([GeneDomain.integer(a, b) for a, b in bounds], Representation.INTEGER, predicate)

    @classmethod
    def binary(cls, c: int, predicate=None) -> GenotypeDomain:
        return cls([GeneDomain.boolean()] * c, Representation.BINARY, predicate)

    @classmethod
    def permutation(cls, c: int, predicate=None) -> GenotypeDomain:
        return cls([GeneDomain.slot(c)] * c, Representation.PERMUTATION, predicate)

    def __len__(self) -> int:
        return len(self.genes)

    def __repr__(self) -> str:
        return f"GenotypeDomain({self.representation.value}, c={len(self.genes)})"

    @property
    def unconstrained(self) -> bool:
        return self.user_predicate is None and self.representation is not Representation.PERMUTATION

    def key(self, values: tuple):
        # Bit-exact: packing distinguishes 0.0 from -0.0, tuples would not.
        if self._pack is not None:
            return self._pack(*values)
        return values

    def in_box(self, values: Sequence) -> bool:
        if len(values) != len(self.genes):
            return False
        if self.representation is Representation.FLOAT:
            for a, x, b in zip(self.lows, values, self.highs):
                if not a <= x <= b:
                    return False
            return True
        return all(g.contains(x) for g, x in zip(self.genes, values))

    def predicate(self, values: tuple) -> bool:
        if self.representation is Representation.PERMUTATION and not _all_distinct(values):
            return False
        return self.user_predicate is None or bool(self.user_predicate(values))

    def validate(self, values: Sequence) -> Validity:
        if not self.in_box(values):
            return Validity.OUT_OF_BOX
        if not self.predicate(tuple(values)):
            return Validity.IN_BOX_NOT_G
        return Validity.IN_G

    def genotype(self, values: Iterable) -> Genotype:
        return Genotype(tuple(values), self)


class Genotype:
    """Immutable gene sequence bound to the domain it was created under.

    Construction does not check bounds: ``validate`` reports whether the
    values are in the box and satisfy the predicate.
    """

    __slots__ = ("values", "domain", "key")

    def __init__(self, values: tuple, domain: GenotypeDomain):
        if len(values) != len(domain.genes):
            raise DomainError(
                f"genotype of length {len(values)} for domain of length {len(domain.genes)}"
            )
        self.values = values
        self.domain = domain
        pack = domain._pack
        self.key = values if pack is None else pack(*values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Genotype):
            return NotImplemented
        return self.key == other.key and self.domain is other.domain

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Genotype{self.values!r}"

    def replace(self, values: tuple) -> Genotype:
        return Genotype(values, self.domain)


Population = list  # list[Genotype]; ordered, duplicates allowed, may be empty


def validate(g: Genotype) -> Validity:
    """Classify a genotype as feasible, in the box only, or out of the box."""
    return g.domain.validate(g.values)


def flatten(populations: Iterable[Sequence[Genotype]]) -> list[Genotype]:
    """Concatenate populations, keeping order and duplicates."""
    return list(itertools.chain.from_iterable(populations))


def random_genotype(
    domain: GenotypeDomain,
    rng: RandomSource,
    max_rejections: int = DEFAULT_MAX_REJECTIONS,
) -> Genotype:
    """Draw a uniformly random feasible genotype by rejection sampling.

    Permutations are drawn directly; a user predicate on top of the
    permutation condition is still handled by rejection.
    """
    if max_rejections < 1:
        raise ValueError("max_rejections must be positive")
    genes = domain.genes
    for _ in range(max_rejections):
        if domain.representation is Representation.PERMUTATION:
            values = tuple(rng.permutation(len(genes)))
        else:
            values = tuple(g.draw(rng) for g in genes)
        if domain.predicate(values):
            return Genotype(values, domain)
    raise RejectionBudgetExhausted(
        f"no feasible genotype after {max_rejections} draws; predicate too restrictive"
    )


class RandomSource:
    """Seeded stream of the draws used by the operators.

    Backed by numpy's PCG64 seeded with a 64-bit integer. Uniforms and
    standard normals are pulled from the generator in blocks, so a stream
    is a pure function of the seed and the sequence of calls made on it.
    """

    _BLOCK = 4096
    algorithm = f"numpy-{np.__version__} PCG64, {_BLOCK}-draw blocks"

    def __init__(self, seed: int):
        if not 0 <= int(seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))
        self._u: list[float] = []
        self._z: list[float] = []

    def random(self) -> float:
        """Uniform draw from [0, 1)."""
        if not self._u:
            self._u = self._gen.random(self._BLOCK).tolist()
            self._u.reverse()
        return self._u.pop()

    def normal(self) -> float:
        """Standard normal draw."""
        if not self._z:
            self._z = self._gen.standard_normal(self._BLOCK).tolist()
            self._z.reverse()
        return self._z.pop()

    def uniform(self, a: float, b: float) -> float:
        return min(b, a + (b - a) * self.random())

    def integer(self, a: int, b: int) -> int:
        """Uniform draw from the integers a..b inclusive."""
        return a + min(int(self.random() * (b - a + 1)), b - a)

    def bernoulli(self, p: float) -> bool:
        return self.random() < p

    def boolean(self) -> bool:
        return self.random() < 0.5

    def permutation(self, n: int) -> list[int]:
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.integer(0, i)
            perm[i], perm[j] = perm[j], perm[i]
        return perm


class FitnessDatabase:
    """Memoizing extended-fitness lookup.

    Every distinct value vector is classified and, if feasible, handed to
    the objective exactly once. ``unique_count`` counts distinct vectors
    queried; ``evaluations`` counts objective calls. Concurrent first
    queries of one vector wait for the single in-flight evaluation.
    """

    def __init__(self, objective: Callable[[tuple], float]):
        self.objective = objective
        self.table: dict = {}
        self.evaluations = 0
        self._pending: dict = {}
        self._lock = threading.Lock()

    @property
    def unique_count(self) -> int:
        return len(self.table)

    def __len__(self) -> int:
        return len(self.table)

    def __contains__(self, g: Genotype) -> bool:
        return g.key in self.table

    def __call__(self, g: Genotype) -> float:
        try:
            return self.table[g.key]
        except KeyError:
            return self._miss(g)

    fitness = __call__

    def _miss(self, g: Genotype) -> float:
        key = g.key
        with self._lock:
            if key in self.table:
                return self.table[key]
            if key in self._pending:
                event = self._pending[key]
                if event is None:
                    event = self._pending[key] = threading.Event()
                owner = False
            else:
                self._pending[key] = None
                owner = True
        if not owner:
            event.wait()
            try:
                return self.table[key]
            except KeyError:
                raise ObjectiveError(f"concurrent evaluation of {g!r} failed") from None
        try:
            value = self._evaluate(g)
        except BaseException:
            with self._lock:
                event = self._pending.pop(key)
            if event is not None:
                event.set()
            raise
        with self._lock:
            self.table[key] = value
            event = self._pending.pop(key)
        if event is not None:
            event.set()
        return value

    def _evaluate(self, g: Genotype) -> float:
        status = g.domain.validate(g.values)
        if status is Validity.OUT_OF_BOX:
            raise DomainError(f"{g!r} lies outside the gene bounds")
        if status is Validity.IN_BOX_NOT_G:
            return INVALID
        value = float(self.objective(g.values))
        self.evaluations += 1
        if not math.isfinite(value):
            raise ObjectiveError(f"objective returned {value} for feasible {g!r}")
        return value

    def many(self, population: Iterable[Genotype]) -> list[float]:
        get = self.table.get
        return [f if (f := get(g.key)) is not None else self._miss(g) for g in population]


class EvolutionRecord:
    """Sequence of generations with the best fitness of each.

    With ``keep_history=False`` only the latest generation is retained;
    ``len`` still counts every generation and ``best`` stays complete.
    """

    def __init__(self, keep_history: bool = True):
        self.keep_history = keep_history
        self.generations: list[list[Genotype]] = []
        self.best: list[float] = []
        self.best_so_far: list[float] = []
        self.latest_fitness: list[float] = []
        self._length = 0

    def append(self, population: list[Genotype], fitness: list[float]) -> None:
        if self.keep_history:
            self.generations.append(population)
        else:
            self.generations = [population]
        self.latest_fitness = fitness
        best = max(fitness) if fitness else INVALID
        self.best.append(best)
        if self.best_so_far and self.best_so_far[-1] > best:
            best = self.best_so_far[-1]
        self.best_so_far.append(best)
        self._length += 1

    @property
    def latest(self) -> list[Genotype]:
        return self.generations[-1]

    def __len__(self) -> int:
        return self._length

    def __getitem__(self, i):
        if not self.keep_history:
            raise IndexError("generation history was not kept")
        return self.generations[i]
