"""Command line front end: ``genelab bench | table | plotdata | list``."""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field, fields

from . import benchmark as bm
from . import testfunctions
from .core import RandomSource


class ConfigError(ValueError):
    pass


def _floats(text):
    return [float(v) for v in text]


def _ints(text):
    return [int(v) for v in text]


# key -> (attribute, parser of the comma-split value list, is a list)
_KEYS = {
    "tf": ("tfs", list, True),
    "group": ("groups", list, True),
    "selection": ("selections", list, True),
    "c": ("dimensions", _ints, True),
    "two_k": ("two_ks", _ints, True),
    "p_r": ("p_rs", _floats, True),
    "p_m": ("p_ms", _floats, True),
    "r": ("rs", _floats, True),
    "runs": ("runs", int, False),
    "seed": ("seed", int, False),
    "jobs": ("jobs", int, False),
    "out": ("out", str, False),
    "eps_f": ("eps_f", float, False),
    "eps_x": ("eps_x", float, False),
    "max_iter": ("max_iter", int, False),
    "variant": ("variant", str, False),
}


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("GENELAB_JOBS", "1")))
    except ValueError:
        return 1


@dataclass
class BenchConfig:
    tfs: list = field(default_factory=lambda: list(testfunctions.NAMES))
    groups: list = field(default_factory=lambda: list(bm.GROUPS))
    selections: list = field(default_factory=lambda: list(bm.SELECTIONS))
    dimensions: list | None = None
    two_ks: list = field(default_factory=lambda: list(bm.TWO_K))
    p_rs: list = field(default_factory=lambda: list(bm.P_R))
    p_ms: list = field(default_factory=lambda: list(bm.P_M))
    rs: list = field(default_factory=lambda: list(bm.R))
    runs: int = 20
    seed: int = 0
    jobs: int = field(default_factory=_default_jobs)
    out: str = "bench.csv"
    eps_f: float = 1e-1
    eps_x: float = 1e-2
    max_iter: int = 10**5
    variant: str = "standard"

    def set(self, key: str, raw: str, where: str) -> None:
        key = key.strip().replace("-", "_")
        if key not in _KEYS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        attr, parse, is_list = _KEYS[key]
        try:
            if is_list:
                items = [v.strip() for v in raw.split(",") if v.strip()]
                if not items:
                    raise ValueError("empty list")
                value = parse(items)
            else:
                value = parse(raw.strip())
        except ValueError as exc:
            raise ConfigError(f"{where}: bad value for {key!r}: {exc}") from None
        setattr(self, attr, value)
        self._check(key, where)

    def _check(self, key: str, where: str) -> None:
        def bad(msg):
            raise ConfigError(f"{where}: {msg}")

        if key == "tf":
            for name in self.tfs:
                if name not in testfunctions.NAMES:
                    bad(f"unknown test function {name!r}")
        elif key == "group":
            for g in self.groups:
                if g not in bm.GROUPS:
                    bad(f"unknown variation group {g!r}")
        elif key == "selection":
            for s in self.selections:
                if s not in bm.SELECTIONS:
                    bad(f"unknown selection {s!r}")
        elif key == "c" and any(c < 1 for c in self.dimensions):
            bad("dimensions must be positive")
        elif key == "two_k" and any(k < 2 or k % 2 for k in self.two_ks):
            bad("parent counts must be positive and even")
        elif key in ("p_r", "p_m"):
            if any(not 0.0 <= p <= 1.0 for p in getattr(self, _KEYS[key][0])):
                bad(f"{key} values must lie in [0, 1]")
        elif key == "r" and any(r <= 0 for r in self.rs):
            bad("r values must be positive")
        elif key in ("runs", "jobs", "max_iter") and getattr(self, _KEYS[key][0]) < (
            0 if key == "max_iter" else 1
        ):
            bad(f"{key} is out of range")
        elif key == "seed" and not 0 <= self.seed < 2**64:
            bad("seed must be a 64-bit unsigned integer")
        elif key in ("eps_f", "eps_x") and getattr(self, key) < 0:
            bad(f"{key} must be nonnegative")
        elif key == "variant" and self.variant not in testfunctions.VARIANTS:
            bad(f"unknown formula variant {self.variant!r}")

    def protocol(self) -> bm.Protocol:
        return bm.Protocol(
            eps_f=self.eps_f, eps_x=self.eps_x, max_iter=self.max_iter, variant=self.variant
        )

    def grid(self) -> list[bm.ParameterPoint]:
        return bm.build_grid(
            self.groups, self.selections, self.tfs, self.dimensions,
            self.two_ks, self.p_rs, self.p_ms, self.rs,
        )


def load_config(path: str, cfg: BenchConfig | None = None) -> BenchConfig:
    """Read flat ``key = value`` lines; ``#`` starts a comment."""
    cfg = cfg or BenchConfig()
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        cfg.set(key, value, f"{path}:{lineno}")
    return cfg


_FLAG_KEYS = [k for k in _KEYS]


def _bench_parser(sub) -> None:
    p = sub.add_parser("bench", help="run a parameter sweep and write CSV")
    p.add_argument("--config", metavar="PATH")
    for key in _FLAG_KEYS:
        p.add_argument("--" + key.replace("_", "-"), dest=key, metavar="VALUE")


def cmd_bench(args) -> int:
    cfg = BenchConfig()
    if args.config:
        load_config(args.config, cfg)
    for key in _FLAG_KEYS:
        value = getattr(args, key)
        if value is not None:
            cfg.set(key, value, "--" + key.replace("_", "-"))
    grid = cfg.grid()
    start = time.perf_counter()
    rows = bm.run_grid(grid, cfg.runs, cfg.seed, cfg.jobs, cfg.protocol())
    elapsed = time.perf_counter() - start
    with open(cfg.out, "w", newline="") as fh:
        bm.write_csv(rows, fh)
    with open(cfg.out + ".meta", "w") as fh:
        fh.write(f"rng = {RandomSource.algorithm}\n")
        fh.write(f"seed = {cfg.seed}\nruns = {cfg.runs}\n")
        fh.write(f"eps_f = {cfg.eps_f}\neps_x = {cfg.eps_x}\nmax_iter = {cfg.max_iter}\n")
        fh.write(f"variant = {cfg.variant}\n")
    failed = sum(1 for r in rows if r.error)
    print(
        f"points: {len(grid)}  runs: {len(grid) * cfg.runs}  failed points: {failed}  "
        f"elapsed: {elapsed:.1f}s  rng: {RandomSource.algorithm}  -> {cfg.out}"
    )
    return 0


def cmd_table(args) -> int:
    try:
        with open(args.csv, newline="") as fh:
            rows = bm.read_csv(fh)
    except OSError as exc:
        raise ConfigError(f"{args.csv}: {exc.strerror}") from None
    sys.stdout.write(bm.render_table(bm.best_sr_table(rows)))
    return 0


def cmd_plotdata(args) -> int:
    try:
        tf = testfunctions.get(args.tf)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    if not tf.supports(2):
        raise ConfigError(f"{tf.name} has no 2-dimensional form")
    if args.resolution < 1:
        raise ConfigError("resolution must be positive")
    if args.out in (None, "-"):
        testfunctions.write_grid(tf, args.resolution, sys.stdout)
    else:
        with open(args.out, "w") as fh:
            testfunctions.write_grid(tf, args.resolution, fh)
    return 0


def _decimal(v: float) -> str:
    s = f"{v:.15f}".rstrip("0")
    return s + "0" if s.endswith(".") else s


def cmd_list(args) -> int:
    for tf in testfunctions.registry():
        x_min = "(" + ", ".join(_decimal(v) for v in tf.x_min) + ")"
        if tf.scalable:
            x_min = f"({_decimal(tf.x_min[0])}, ...)"
        print(
            f"{tf.name:16s} c={tf.arity:2s} box=[{tf.low:g}, {tf.high:g}]^{tf.arity}  "
            f"x_min={x_min}  f_min={_decimal(tf.f_min)}"
        )
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="genelab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _bench_parser(sub)
    p = sub.add_parser("table", help="render the best-SR table of a results CSV")
    p.add_argument("csv")
    p = sub.add_parser("plotdata", help="sample a test function on a 2-d lattice")
    p.add_argument("tf")
    p.add_argument("--resolution", type=int, default=101)
    p.add_argument("--out", metavar="PATH")
    sub.add_parser("list", help="list the test functions")
    args = parser.parse_args(argv)
    handler = {"bench": cmd_bench, "table": cmd_table, "plotdata": cmd_plotdata, "list": cmd_list}
    try:
        return handler[args.command](args)
    except (ConfigError, bm.MalformedCSV) as exc:
        print(f"genelab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
