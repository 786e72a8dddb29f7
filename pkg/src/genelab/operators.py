"""Variation operators.

A :class:`Variation` maps ``n_in`` parents to ``n_out`` children. Operators
that move genes (Gaussian and self-adaptive mutation) clamp to the violated
bound; the others only copy, average or reshuffle values, so children of
in-box parents stay in the box. The domain predicate may still be broken
by any operator; that is left to the extended fitness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import (
    DomainError,
    GeneDomain,
    Genotype,
    GenotypeDomain,
    RandomSource,
    Representation,
)

__all__ = [
    "RepresentationError",
    "SelfAdaptiveDomain",
    "Variation",
    "arithmetic_recombination",
    "compose",
    "cut_and_crossfill",
    "default_taus",
    "gaussian_mutation",
    "identity",
    "one_point_crossover",
    "random_reset_mutation",
    "self_adaptive_mutation",
    "single_arithmetic_recombination",
    "stochastic",
    "swap_mutation",
]

FLOAT = Representation.FLOAT
PERMUTATION = Representation.PERMUTATION


class RepresentationError(TypeError):
    """Operator applied to a genotype of an unsupported representation."""


@dataclass(frozen=True)
class Variation:
    n_in: int
    n_out: int
    apply: Callable[[Sequence[Genotype], RandomSource], list[Genotype]]
    name: str = "variation"

    def __call__(self, parents: Sequence[Genotype], rng: RandomSource) -> list[Genotype]:
        if len(parents) != self.n_in:
            raise ValueError(f"{self.name} takes {self.n_in} parents, got {len(parents)}")
        return self.apply(parents, rng)

    def __repr__(self) -> str:
        return f"<{self.name} {self.n_in}->{self.n_out}>"


def _require(domain: GenotypeDomain, allowed: tuple[Representation, ...], name: str) -> None:
    if domain.representation not in allowed:
        raise RepresentationError(f"{name} does not support {domain.representation.value}")


def gaussian_mutation(sigma: float, p: float) -> Variation:
    """Add ``sigma * N(0, 1)`` to each gene with probability ``p``, clamping to bounds."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")

    def apply(parents, rng):
        g = parents[0]
        d = g.domain
        _require(d, (FLOAT,), "gaussian mutation")
        values = list(g.values)
        changed = False
        for i in range(len(values)):
            if rng.bernoulli(p):
                x = values[i] + sigma * rng.normal()
                if x < d.lows[i]:
                    x = d.lows[i]
                elif x > d.highs[i]:
                    x = d.highs[i]
                values[i] = x
                changed = True
        return [Genotype(tuple(values), d)] if changed else [g]

    return Variation(1, 1, apply, f"gaussian(sigma={sigma:g}, p={p:g})")


def swap_mutation() -> Variation:
    """Exchange the genes at two independently drawn loci."""

    def apply(parents, rng):
        g = parents[0]
        c = len(g.values)
        i = rng.integer(0, c - 1)
        j = rng.integer(0, c - 1)
        if i == j:
            return [g]
        values = list(g.values)
        values[i], values[j] = values[j], values[i]
        return [Genotype(tuple(values), g.domain)]

    return Variation(1, 1, apply, "swap")


def random_reset_mutation(p: float) -> Variation:
    """Redraw each gene from its own domain with probability ``p``."""

    def apply(parents, rng):
        g = parents[0]
        d = g.domain
        if d.representation is PERMUTATION:
            raise RepresentationError("random-reset mutation does not support permutation")
        values = list(g.values)
        changed = False
        for i, gene in enumerate(d.genes):
            if rng.bernoulli(p):
                values[i] = gene.draw(rng)
                changed = True
        return [Genotype(tuple(values), d)] if changed else [g]

    return Variation(1, 1, apply, f"random-reset(p={p:g})")


class SelfAdaptiveDomain(GenotypeDomain):
    """Floating-point domain extended with one step-size gene per locus.

    The first ``c`` genes are the object variables of ``base``, the last
    ``c`` the step sizes. Step-size bounds default to ``[1e-9, b_i - a_i]``.
    The base predicate is applied to the object variables only.
    """

    def __init__(
        self,
        base: GenotypeDomain,
        sigma_bounds: Sequence[tuple[float, float]] | None = None,
    ):
        if base.representation is not FLOAT:
            raise DomainError("self-adaptation needs a floating-point base domain")
        c = len(base)
        if sigma_bounds is None:
            sigma_bounds = [(1e-9, g.width) for g in base.genes]
        sigma_bounds = list(sigma_bounds)
        if len(sigma_bounds) != c:
            raise DomainError("one step-size interval per object gene is required")
        if any(lo <= 0 for lo, _ in sigma_bounds):
            raise DomainError("step sizes must be bounded away from zero")
        pred = base.user_predicate
        super().__init__(
            list(base.genes) + [GeneDomain.real(lo, hi) for lo, hi in sigma_bounds],
            FLOAT,
            None if pred is None else (lambda v: pred(v[:c])),
        )
        self.base = base
        self.c = c

    def objective(self, f: Callable[[tuple], float]) -> Callable[[tuple], float]:
        """Lift an objective on the base domain; step sizes do not affect it."""
        c = self.c
        return lambda values: f(values[:c])


def default_taus(c: int) -> tuple[float, float]:
    return 1.0 / math.sqrt(2.0 * c), 1.0 / math.sqrt(2.0 * math.sqrt(c))


def self_adaptive_mutation(tau0: float | None = None, tau1: float | None = None) -> Variation:
    """Log-normal step-size update followed by a Gaussian move of every gene.

    Taus left as ``None`` default to ``1/sqrt(2c)`` and ``1/sqrt(2 sqrt(c))``
    for the object length ``c`` of the genotype being mutated.
    """

    def apply(parents, rng):
        g = parents[0]
        d = g.domain
        if not isinstance(d, SelfAdaptiveDomain):
            raise RepresentationError("self-adaptive mutation needs a SelfAdaptiveDomain")
        c = d.c
        t0, t1 = default_taus(c)
        t0 = t0 if tau0 is None else tau0
        t1 = t1 if tau1 is None else tau1
        lows, highs = d.lows, d.highs
        shared = t0 * rng.normal()
        values = list(g.values)
        for i in range(c, 2 * c):
            s = values[i] * math.exp(shared + t1 * rng.normal())
            values[i] = min(max(s, lows[i]), highs[i])
        for i in range(c):
            x = values[i] + values[c + i] * rng.normal()
            values[i] = min(max(x, lows[i]), highs[i])
        return [Genotype(tuple(values), d)]

    return Variation(1, 1, apply, "self-adaptive")


def arithmetic_recombination() -> Variation:
    """One child at the midpoint of the two parents."""

    def apply(parents, rng):
        g, h = parents
        _require(g.domain, (FLOAT,), "arithmetic recombination")
        return [Genotype(tuple((x + y) / 2 for x, y in zip(g.values, h.values)), g.domain)]

    return Variation(2, 1, apply, "arithmetic")


def single_arithmetic_recombination() -> Variation:
    """Two children copying their parents except at one shared locus set to the midpoint."""

    def apply(parents, rng):
        g, h = parents
        _require(g.domain, (FLOAT,), "single arithmetic recombination")
        k = rng.integer(0, len(g.values) - 1)
        mid = (g.values[k] + h.values[k]) / 2
        a = list(g.values)
        b = list(h.values)
        a[k] = b[k] = mid
        return [Genotype(tuple(a), g.domain), Genotype(tuple(b), h.domain)]

    return Variation(2, 2, apply, "single-arithmetic")


def one_point_crossover() -> Variation:
    """Exchange the tails starting at a locus drawn from 0..c-1."""

    def apply(parents, rng):
        g, h = parents
        if g.domain.representation is PERMUTATION:
            raise RepresentationError("one-point crossover does not support permutation")
        k = rng.integer(0, len(g.values) - 1)
        x, y = g.values, h.values
        return [Genotype(x[:k] + y[k:], g.domain), Genotype(y[:k] + x[k:], h.domain)]

    return Variation(2, 2, apply, "one-point")


def _crossfill(head: tuple, donor: tuple) -> tuple:
    used = set(head)
    return head + tuple(v for v in donor if v not in used)


def cut_and_crossfill() -> Variation:
    """Keep a head of length k from 1..c-1, fill the rest in the other parent's order."""

    def apply(parents, rng):
        g, h = parents
        _require(g.domain, (PERMUTATION,), "cut-and-crossfill")
        c = len(g.values)
        if c < 2:
            raise DomainError("cut-and-crossfill needs genotype length of at least 2")
        k = rng.integer(1, c - 1)
        return [
            Genotype(_crossfill(g.values[:k], h.values), g.domain),
            Genotype(_crossfill(h.values[:k], g.values), h.domain),
        ]

    return Variation(2, 2, apply, "cut-and-crossfill")


def _check_identity_arity(n: int, m: int) -> None:
    if abs(n - m) > 1 or n < 0 or m < 0 or (n == 0 and m == 1):
        raise ValueError(f"no identity variation from {n} to {m} genotypes")


def _identity(parents: Sequence[Genotype], m: int, rng: RandomSource) -> list[Genotype]:
    parents = list(parents)
    n = len(parents)
    if m == n:
        return parents
    k = rng.integer(0, n - 1)
    if m == n + 1:
        return parents[: k + 1] + parents[k:]
    return parents[:k] + parents[k + 1:]


def identity(n: int, m: int | None = None) -> Variation:
    """Pass parents through, duplicating or dropping one random element when m = n +/- 1."""
    m = n if m is None else m
    _check_identity_arity(n, m)
    return Variation(n, m, lambda parents, rng: _identity(parents, m, rng), f"identity({n},{m})")


def stochastic(v: Variation, p: float) -> Variation:
    """Apply ``v`` with probability ``p``, otherwise the arity-matching identity.

    The Bernoulli decision is always drawn first; the identity draws its
    locus only when it actually changes the arity.
    """
    n, m = v.n_in, v.n_out
    _check_identity_arity(n, m)
    inner = v.apply

    def apply(parents, rng):
        if rng.bernoulli(p):
            return inner(parents, rng)
        return _identity(parents, m, rng)

    return Variation(n, m, apply, f"S({v.name}, {p:g})")


def compose(recombination: Variation, mutation: Variation) -> Variation:
    """Recombine, then mutate every child independently."""
    if mutation.n_in != 1 or mutation.n_out != 1:
        raise ValueError("the mapped operator must be a mutation (1 -> 1)")
    recombine = recombination.apply
    mutate = mutation.apply

    def apply(parents, rng):
        return [mutate((child,), rng)[0] for child in recombine(parents, rng)]

    return Variation(
        recombination.n_in,
        recombination.n_out,
        apply,
        f"map({mutation.name}) . {recombination.name}",
    )
