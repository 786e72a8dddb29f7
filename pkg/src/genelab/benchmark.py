"""Tuning harness: parameter grid, repeated seeded runs, statistics, CSV.

Each grid point fixes a variation group, a selection scheme, a test
function with its dimension, and the operator parameters. A run minimizes
the test function (fitness is its negative) until a member is within
``eps_f`` of the minimum value and ``eps_x`` of the minimizer, or the
iteration cap is reached.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy import stats as sps

from . import testfunctions
from .core import FitnessDatabase, RandomSource
from .engine import AnyOf, EvolutionConfig, MaxIterations, MinimumLocalized, evolve
from .operators import (
    arithmetic_recombination,
    compose,
    gaussian_mutation,
    random_reset_mutation,
    single_arithmetic_recombination,
    stochastic,
)
from .selection import FPS, ExponentialRanking, LinearRanking

log = logging.getLogger(__name__)

GAUSS_ARITH = "gaussian+arithmetic"
GAUSS_SINGLE = "gaussian+single-arithmetic"
RESET_SINGLE = "random-reset+single-arithmetic"
GROUPS = (GAUSS_ARITH, GAUSS_SINGLE, RESET_SINGLE)
SELECTIONS = ("fps", "lin-rs", "exp-rs")
DIMENSIONS = {
    GAUSS_ARITH: (2, 4, 8),
    GAUSS_SINGLE: (2, 4, 8, 16),
    RESET_SINGLE: (2, 4, 8, 16, 32),
}
TWO_K = (2, 4, 8, 16, 32, 64)
P_R = (1.0, 0.5)
P_M = (1.0, 0.5)
R = (0.5, 0.05, 0.005)

CSV_HEADER = (
    "group,selection,tf,c,two_k,p_r,p_m,r,runs,sr,aus,sigma_aus,"
    "mean_df,sigma_df,mean_dx,sigma_dx"
).split(",")
MISSING = "--"


@dataclass(frozen=True)
class ParameterPoint:
    group: str
    selection: str
    tf: str
    c: int
    two_k: int
    p_r: float
    p_m: float
    r: float | None = None

    def __post_init__(self):
        if self.group not in GROUPS:
            raise ValueError(f"unknown variation group {self.group!r}")
        if self.selection not in SELECTIONS:
            raise ValueError(f"unknown selection {self.selection!r}")
        if (self.group == RESET_SINGLE) != (self.r is None):
            raise ValueError("r is required for Gaussian groups and absent for random-reset")

    @property
    def gaussian(self) -> bool:
        return self.group != RESET_SINGLE

    def test_function(self, variant: str = "standard") -> testfunctions.TestFunction:
        return testfunctions.get(self.tf, self.c, variant=variant)

    def sigma(self) -> float:
        tf = self.test_function()
        return self.r * min(b - a for a, b in tf.bounds)

    def variation(self):
        p = 1.0 / self.c
        if self.group == GAUSS_ARITH:
            recombination = arithmetic_recombination()
        else:
            recombination = single_arithmetic_recombination()
        if self.gaussian:
            mutation = gaussian_mutation(self.sigma(), p)
        else:
            mutation = random_reset_mutation(p)
        return compose(stochastic(recombination, self.p_r), stochastic(mutation, self.p_m))

    def weights(self):
        return {"fps": FPS(), "lin-rs": LinearRanking(2.0), "exp-rs": ExponentialRanking()}[
            self.selection
        ]


@dataclass(frozen=True)
class Protocol:
    mu: int = 100
    eps_f: float = 1e-1
    eps_x: float = 1e-2
    max_iter: int = 10**5
    variant: str = "standard"  # formula variant, see testfunctions.get


@dataclass
class Trial:
    """Everything needed to run one evolution for a grid point."""

    config: EvolutionConfig
    tf: testfunctions.TestFunction
    localized: MinimumLocalized

    @property
    def domain(self):
        return self.tf.domain()

    @property
    def objective(self):
        f = self.tf.formula
        return lambda x: -f(x)


def setup(pp: ParameterPoint, protocol: Protocol = Protocol(), seed: int = 0) -> Trial:
    tf = pp.test_function(protocol.variant)
    localized = MinimumLocalized(tf.x_min, -tf.f_min, protocol.eps_x, protocol.eps_f)
    weights = pp.weights()
    cfg = EvolutionConfig(
        mu=protocol.mu,
        two_k=pp.two_k,
        variation=pp.variation(),
        parent_weights=weights,
        survivor_weights=weights,
        termination=AnyOf((localized, MaxIterations(protocol.max_iter))),
        seed=seed,
        keep_history=False,
    )
    return Trial(cfg, tf, localized)


@dataclass(frozen=True)
class RunRecord:
    success: bool
    unique_evaluations: int
    iterations: int
    best_point: tuple
    best_df: float
    best_dx: float
    seed: int
    objective_calls: int = 0


def record_from(trial: Trial, result, seed: int) -> RunRecord:
    evolution, db, iterations = result
    loc = trial.localized
    members = list(zip(evolution.latest, evolution.latest_fitness))
    hits = [(g, f) for g, f in members if loc.matches(g, f)]
    if hits:
        g, f = min(hits, key=lambda gf: abs(gf[1] - loc.fitness_at_min))
    else:
        g, f = max(members, key=lambda gf: gf[1])
    return RunRecord(
        success=bool(hits),
        unique_evaluations=db.unique_count,
        iterations=iterations,
        best_point=g.values,
        best_df=abs(-f - trial.tf.f_min),
        best_dx=loc.distance(g),
        seed=seed,
        objective_calls=db.evaluations,
    )


def run_single(pp: ParameterPoint, seed: int, protocol: Protocol = Protocol()) -> RunRecord:
    trial = setup(pp, protocol, seed)
    result = evolve(trial.config, trial.domain, FitnessDatabase(trial.objective), RandomSource(seed))
    return record_from(trial, result, seed)


@dataclass(frozen=True)
class AggregateStats:
    runs: int
    sr: float
    aus: float | None = None
    sigma_aus: float | None = None
    mean_df: float | None = None
    sigma_df: float | None = None
    mean_dx: float | None = None
    sigma_dx: float | None = None


def _mean_sd(xs: Sequence[float]) -> tuple[float | None, float | None]:
    if not xs:
        return None, None
    return statistics.fmean(xs), statistics.stdev(xs) if len(xs) > 1 else None


def aggregate(records: Sequence[RunRecord]) -> AggregateStats:
    """SR over all runs; efficiency and accuracy over the successful ones."""
    if not records:
        raise ValueError("cannot aggregate an empty list of runs")
    ok = [r for r in records if r.success]
    aus, sigma_aus = _mean_sd([r.unique_evaluations for r in ok])
    mean_df, sigma_df = _mean_sd([r.best_df for r in ok])
    mean_dx, sigma_dx = _mean_sd([r.best_dx for r in ok])
    return AggregateStats(
        runs=len(records),
        sr=100.0 * len(ok) / len(records),
        aus=aus,
        sigma_aus=sigma_aus,
        mean_df=mean_df,
        sigma_df=sigma_df,
        mean_dx=mean_dx,
        sigma_dx=sigma_dx,
    )


def run_seed(master_seed: int, point_index: int, run_index: int) -> int:
    """64-bit seed of one run, independent of scheduling."""
    seq = np.random.SeedSequence([master_seed, point_index, run_index])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def build_grid(
    groups: Iterable[str] = GROUPS,
    selections: Iterable[str] = SELECTIONS,
    tfs: Iterable[str] = testfunctions.NAMES,
    dimensions: Iterable[int] | None = None,
    two_ks: Iterable[int] = TWO_K,
    p_rs: Iterable[float] = P_R,
    p_ms: Iterable[float] = P_M,
    rs: Iterable[float] = R,
) -> list[ParameterPoint]:
    """Cartesian product of the selectors, minus combinations that do not exist.

    Without explicit ``dimensions`` each group uses its own schedule. A
    test function is only paired with dimensions it supports.
    """
    grid = []
    tfs, two_ks, p_rs, p_ms, rs = (list(x) for x in (tfs, two_ks, p_rs, p_ms, rs))
    selections = list(selections)
    for group in groups:
        dims = DIMENSIONS[group] if dimensions is None else list(dimensions)
        ratios = rs if group != RESET_SINGLE else [None]
        for selection in selections:
            for c in dims:
                for name in tfs:
                    if not testfunctions.get(name).supports(c):
                        continue
                    for two_k in two_ks:
                        for p_r in p_rs:
                            for p_m in p_ms:
                                for r in ratios:
                                    grid.append(
                                        ParameterPoint(group, selection, name, c, two_k, p_r, p_m, r)
                                    )
    return grid


@dataclass
class GridRow:
    point: ParameterPoint
    stats: AggregateStats | None
    records: list[RunRecord] = field(default_factory=list, repr=False)
    error: str | None = None


def _task(args) -> RunRecord | str:
    pp, seed, protocol = args
    try:
        return run_single(pp, seed, protocol)
    except Exception as exc:  # reported in the row, the sweep goes on
        return f"{type(exc).__name__}: {exc}"


def run_grid(
    grid: Sequence[ParameterPoint],
    runs: int,
    master_seed: int,
    jobs: int = 1,
    protocol: Protocol = Protocol(),
) -> list[GridRow]:
    """Run every point ``runs`` times; the result does not depend on ``jobs``."""
    tasks = [
        (pp, run_seed(master_seed, pi, ri), protocol)
        for pi, pp in enumerate(grid)
        for ri in range(runs)
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_task, tasks, chunksize=1))
    else:
        results = [_task(t) for t in tasks]
    rows = []
    for pi, pp in enumerate(grid):
        chunk = results[pi * runs : (pi + 1) * runs]
        errors = [r for r in chunk if isinstance(r, str)]
        if errors:
            log.warning("point %s failed: %s", pp, errors[0])
            rows.append(GridRow(pp, None, error=errors[0]))
        elif not chunk:
            rows.append(GridRow(pp, None, error="no runs requested"))
        else:
            rows.append(GridRow(pp, aggregate(chunk), chunk))
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{x:.6g}"


def csv_rows(rows: Iterable[GridRow]) -> Iterator[list[str]]:
    for row in rows:
        pp, s = row.point, row.stats
        head = [pp.group, pp.selection, pp.tf, str(pp.c), str(pp.two_k), _fmt(pp.p_r), _fmt(pp.p_m), _fmt(pp.r)]
        if s is None:
            yield head + ["0"] + [""] * 7
        else:
            yield head + [
                str(s.runs),
                _fmt(s.sr),
                _fmt(s.aus),
                _fmt(s.sigma_aus),
                _fmt(s.mean_df),
                _fmt(s.sigma_df),
                _fmt(s.mean_dx),
                _fmt(s.sigma_dx),
            ]


def write_csv(rows: Iterable[GridRow], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(csv_rows(rows))


def to_csv(rows: Iterable[GridRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


class MalformedCSV(ValueError):
    pass


def read_csv(src) -> list[dict]:
    """Parse a results file back into dicts with typed ``c`` and ``sr``."""
    reader = csv.DictReader(src)
    if reader.fieldnames != CSV_HEADER:
        raise MalformedCSV(f"unexpected header {reader.fieldnames}")
    out = []
    for lineno, row in enumerate(reader, start=2):
        try:
            row["c"] = int(row["c"])
            row["sr"] = float(row["sr"]) if row["sr"] else None
        except (TypeError, ValueError) as exc:
            raise MalformedCSV(f"line {lineno}: {exc}") from None
        out.append(row)
    return out


def best_sr_table(results: Iterable) -> dict[tuple[str, str, int], dict[str, float]]:
    """Maximum SR per (group, selection, c) and test function.

    Accepts :class:`GridRow` objects or dicts as returned by
    :func:`read_csv`. Cells that were never run are simply absent.
    """
    table: dict[tuple[str, str, int], dict[str, float]] = {}
    for item in results:
        if isinstance(item, GridRow):
            if item.stats is None:
                continue
            key = (item.point.group, item.point.selection, item.point.c)
            tf, sr = item.point.tf, item.stats.sr
        else:
            if item["sr"] is None:
                continue
            key = (item["group"], item["selection"], int(item["c"]))
            tf, sr = item["tf"], item["sr"]
        cell = table.setdefault(key, {})
        cell[tf] = max(sr, cell.get(tf, -math.inf))
    return table


def _order(key):
    group, selection, c = key
    g = GROUPS.index(group) if group in GROUPS else len(GROUPS)
    s = SELECTIONS.index(selection) if selection in SELECTIONS else len(SELECTIONS)
    return g, group, s, selection, c


def render_table(table: dict, tfs: Sequence[str] = testfunctions.NAMES) -> str:
    """Fixed-width text rendering with one column per test function."""
    head = ["group", "selection", "c", *tfs]
    lines = [head]
    for key in sorted(table, key=_order):
        cells = table[key]
        lines.append(
            [key[0], key[1], str(key[2])]
            + [f"{cells[t]:.0f}" if t in cells else MISSING for t in tfs]
        )
    widths = [max(len(line[i]) for line in lines) for i in range(len(head))]
    return "\n".join(
        "  ".join(cell.rjust(w) if i >= 2 else cell.ljust(w) for i, (cell, w) in enumerate(zip(line, widths))).rstrip()
        for line in lines
    ) + "\n"


def fit_scaling_exponent(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Slope and its standard error of ``ln AUS`` against ``ln c``."""
    if len(points) < 3:
        raise ValueError("at least three (c, AUS) points are needed")
    cs = [c for c, _ in points]
    if len(set(cs)) != len(cs):
        raise ValueError("dimensions must be distinct")
    if any(a <= 0 for _, a in points):
        raise ValueError("AUS values must be positive")
    fit = sps.linregress(np.log(cs), np.log([a for _, a in points]))
    return float(fit.slope), float(fit.stderr)
