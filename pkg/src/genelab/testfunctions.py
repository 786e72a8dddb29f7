"""Sixteen analytic minimization problems with known minima.

Every function is defined on a cube ``[low, high]^c``. Scalable functions
accept any dimension (Rosenbrock needs at least 2); the others have a
fixed arity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Sequence

from .core import GenotypeDomain

__all__ = [
    "ALUFFI_PENTINI_X0",
    "NAMES",
    "TestFunction",
    "UnsupportedDimension",
    "get",
    "grid_sample",
    "registry",
    "write_grid",
]


class UnsupportedDimension(ValueError):
    pass


def ackley(x):
    n = len(x)
    r = math.sqrt(sum(v * v for v in x))
    cs = sum(math.cos(2.0 * math.pi * v) for v in x) / n
    return -20.0 * math.exp(-0.02 / math.sqrt(n) * r) - math.exp(cs) + 20.0 + math.e


def alpine(x):
    return sum(abs(v * math.sin(v) + 0.1 * v) for v in x)


def aluffi_pentini(x):
    x0, x1 = x
    return 0.25 * x0**4 - 0.5 * x0**2 + 0.1 * x0 + 0.5 * x1**2


def booth(x):
    x0, x1 = x
    return (x0 + 2.0 * x1 - 7.0) ** 2 + (2.0 * x0 + x1 - 5.0) ** 2


def colville(x):
    x0, x1, x2, x3 = x
    return (
        100.0 * (x0 - x1**2) ** 2
        + (1.0 - x0) ** 2
        + 90.0 * (x3 - x2**2) ** 2
        + (1.0 - x2) ** 2
        + 10.1 * ((x1 - 1.0) ** 2 + (x3 - 1.0) ** 2)
        + 19.8 * (x1 - 1.0) * (x3 - 1.0)
    )


def colville_literal(x):
    # 10.1 multiplies only the first square, in the literal form.
    # The cross terms are then indefinite and (1, 1, 1, 1) is not a minimum.
    x0, x1, x2, x3 = x
    return (
        100.0 * (x0 - x1**2) ** 2
        + (1.0 - x0) ** 2
        + 90.0 * (x3 - x2**2) ** 2
        + (1.0 - x2) ** 2
        + 10.1 * (x1 - 1.0) ** 2
        + (x3 - 1.0) ** 2
        + 19.8 * (x1 - 1.0) * (x3 - 1.0)
    )


def easom(x):
    x0, x1 = x
    return -math.cos(x0) * math.cos(x1) * math.exp(-((x0 - math.pi) ** 2) - (x1 - math.pi) ** 2)


def exponential(x):
    return -math.exp(-0.5 * sum(v * v for v in x))


def goldstein_price(x):
    x0, x1 = x
    a = 1.0 + (x0 + x1 + 1.0) ** 2 * (
        19.0 - 14.0 * x0 + 3.0 * x0**2 - 14.0 * x1 + 6.0 * x0 * x1 + 3.0 * x1**2
    )
    b = 30.0 + (2.0 * x0 - 3.0 * x1) ** 2 * (
        18.0 - 32.0 * x0 + 12.0 * x0**2 + 48.0 * x1 - 36.0 * x0 * x1 + 27.0 * x1**2
    )
    return a * b


def hosaki(x):
    x0, x1 = x
    poly = 1.0 - 8.0 * x0 + 7.0 * x0**2 - 7.0 / 3.0 * x0**3 + 0.25 * x0**4
    return poly * x1**2 * math.exp(-x1)


def leon(x):
    x0, x1 = x
    return 100.0 * (x1 - x0**2) ** 2 + (1.0 - x0) ** 2


def matyas(x):
    x0, x1 = x
    return 0.26 * (x0**2 + x1**2) - 0.48 * x0 * x1


def mexican_hat(x):
    x0, x1 = x
    g = 0.1 + math.sqrt((x0 - 4.0) ** 2 + (x1 - 4.0) ** 2)
    return -20.0 * math.sin(g) / g


def miele_cantrell(x):
    x0, x1, x2, x3 = x
    return (
        (math.exp(-x0) - x1) ** 4
        + 100.0 * (x1 - x2) ** 6
        + math.tan(x2 - x3) ** 4
        + x0**8
    )


def rosenbrock(x):
    return sum(
        100.0 * (x[i + 1] - x[i] ** 2) ** 2 + (x[i] - 1.0) ** 2 for i in range(len(x) - 1)
    )


def schwefel(x):
    total = 0.0
    partial = 0.0
    for v in x:
        partial += v
        total += partial * partial
    return total


def schwefel_literal(x):
    # Inner sum of i + 1 copies of x_i, in the literal form.
    return sum(((i + 1) * v) ** 2 for i, v in enumerate(x))


def sphere(x):
    return sum(v * v for v in x)


def _aluffi_pentini_x0(q: float = 0.1, k: int = 2) -> float:
    return (
        2.0 * math.sqrt(3.0) / 3.0
        * math.cos(math.acos(-3.0 * math.sqrt(3.0) / 2.0 * q) / 3.0 - 2.0 * math.pi / 3.0 * k)
    )


#: Minimizing root of x^3 - x + 0.1 = 0 to 15 decimal places (Aluffi-Pentini).
ALUFFI_PENTINI_X0 = -1.046680531804602


@dataclass(frozen=True)
class TestFunction:
    """A minimization problem on the cube ``[low, high]^c``."""

    __test__ = False  # keep pytest from collecting this class

    name: str
    c: int
    low: float
    high: float
    formula: Callable[[Sequence[float]], float] = field(repr=False)
    x_min: tuple
    f_min: float
    scalable: bool = False
    min_c: int = 1

    @property
    def arity(self) -> str:
        return "n" if self.scalable else str(self.c)

    @property
    def bounds(self) -> list[tuple[float, float]]:
        return [(self.low, self.high)] * self.c

    def at(self, c: int) -> TestFunction:
        """This function instantiated in dimension ``c``."""
        if c == self.c:
            return self
        if not self.scalable or c < self.min_c:
            raise UnsupportedDimension(f"{self.name} is not defined for c = {c}")
        return replace(self, c=c, x_min=(self.x_min[0],) * c)

    def supports(self, c: int) -> bool:
        return c == self.c or (self.scalable and c >= self.min_c)

    def evaluate(self, x: Sequence[float]) -> float:
        if len(x) != self.c:
            raise UnsupportedDimension(f"{self.name} expects {self.c} coordinates, got {len(x)}")
        if any(not self.low <= v <= self.high for v in x):
            raise ValueError(f"{tuple(x)} lies outside [{self.low}, {self.high}]^{self.c}")
        return self.formula(tuple(x))

    __call__ = evaluate

    def domain(self) -> GenotypeDomain:
        return GenotypeDomain.box(self.low, self.high, self.c)


def _scalable(name, low, high, formula, x0, f_min, min_c=1, c=2):
    return TestFunction(name, c, low, high, formula, (x0,) * c, f_min, True, min_c)


def _table() -> list[TestFunction]:
    ap_min = (ALUFFI_PENTINI_X0, 0.0)
    return [
        _scalable("ackley", -35.0, 35.0, ackley, 0.0, 0.0),
        _scalable("alpine", -10.0, 10.0, alpine, 0.0, 0.0),
        TestFunction("aluffi-pentini", 2, -10.0, 10.0, aluffi_pentini, ap_min, aluffi_pentini(ap_min)),
        TestFunction("booth", 2, -10.0, 10.0, booth, (1.0, 3.0), 0.0),
        TestFunction("colville", 4, -10.0, 10.0, colville, (1.0, 1.0, 1.0, 1.0), 0.0),
        TestFunction("easom", 2, -100.0, 100.0, easom, (math.pi, math.pi), -1.0),
        _scalable("exponential", -1.0, 1.0, exponential, 0.0, -1.0),
        TestFunction("goldstein-price", 2, -2.0, 2.0, goldstein_price, (0.0, -1.0), 3.0),
        TestFunction("hosaki", 2, -10.0, 10.0, hosaki, (4.0, 2.0), -52.0 / (3.0 * math.e**2)),
        TestFunction("leon", 2, -1.2, 1.2, leon, (1.0, 1.0), 0.0),
        TestFunction("matyas", 2, -10.0, 10.0, matyas, (0.0, 0.0), 0.0),
        TestFunction(
            "mexican-hat", 2, -10.0, 10.0, mexican_hat, (4.0, 4.0), -20.0 * math.sin(0.1) / 0.1
        ),
        TestFunction("miele-cantrell", 4, -1.0, 1.0, miele_cantrell, (0.0, 1.0, 1.0, 1.0), 0.0),
        _scalable("rosenbrock", -30.0, 30.0, rosenbrock, 1.0, 0.0, min_c=2),
        _scalable("schwefel", -100.0, 100.0, schwefel, 0.0, 0.0),
        _scalable("sphere", 0.0, 10.0, sphere, 0.0, 0.0),
    ]


_REGISTRY = {tf.name: tf for tf in _table()}
NAMES = tuple(_REGISTRY)


def registry() -> list[TestFunction]:
    """All sixteen functions; scalable ones at c = 2."""
    return list(_REGISTRY.values())


VARIANTS = ("standard", "literal")
_LITERAL = {"schwefel": schwefel_literal, "colville": colville_literal}


def get(name: str, c: int | None = None, *, variant: str = "standard") -> TestFunction:
    """Look up a function by name, optionally instantiated in dimension ``c``.

    ``variant="literal"`` swaps in the formula exactly as typeset in the
    source table where that differs from the usual form: Schwefel with a
    single sum (same minimum) and Colville without the grouping parentheses
    (whose listed minimizer is then not a minimum). Other functions are
    unaffected.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown formula variant {variant!r}")
    try:
        tf = _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown test function {name!r}") from None
    if variant == "literal" and name in _LITERAL:
        tf = replace(tf, formula=_LITERAL[name])
    return tf if c is None else tf.at(c)


def _lattice(low: float, high: float, n: int) -> list[float]:
    if n == 1:
        return [low]
    return [low + (high - low) * i / (n - 1) if i < n - 1 else high for i in range(n)]


def grid_sample(tf: TestFunction, resolution: int) -> Iterator[tuple[float, float, float]]:
    """Row-major ``(x0, x1, value)`` triples on a ``resolution^2`` lattice over the box."""
    if tf.c != 2:
        if not tf.supports(2):
            raise UnsupportedDimension(f"{tf.name} has no 2-dimensional form")
        tf = tf.at(2)
    if resolution < 1:
        raise ValueError("resolution must be positive")
    axis = _lattice(tf.low, tf.high, resolution)
    for x0 in axis:
        for x1 in axis:
            yield x0, x1, tf.formula((x0, x1))


def write_grid(tf: TestFunction, resolution: int, out) -> int:
    """Write gnuplot-style blocks, one per ``x0`` value. Returns the row count."""
    rows = 0
    previous = None
    for x0, x1, v in grid_sample(tf, resolution):
        if previous is not None and x0 != previous:
            out.write("\n")
        previous = x0
        out.write(f"{x0!r} {x1!r} {v!r}\n")
        rows += 1
    return rows
