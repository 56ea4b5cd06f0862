"""Command-line front end.

Subcommands::

    wet             t -> w(t) table (exact, or the Monte Carlo oracle)
    simulate        ExperimentResult rows over a log-spaced n-grid
    figure1         two-circle drop curves: CSV plus two SVG panels
    theorem2-check  envelope bounds on E[1 - mu(P_n)]
    theorem3-check  drop-sequence ledger and the f0 lower bound at n_i + 1
    epsnet          floating-body containment failures against the KPW bound
    efron-check     E[f0(P_n)] = n (1 - E[mu(P_{n-1})]) z-scores

CSV goes to ``--out`` (default stdout), progress and the verdict to stderr.
Check commands exit 0 when every row passes and 1 otherwise; usage errors exit 2.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import math
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bounds, montecarlo, svg
from .measures import (ConcentricCircles, DropSequence, Measure, UniformDisk, UnsupportedMeasure,
                       equilateral_triangle_boundary, single_circle, two_circle_drop)
from .wetpart import mc_wet_oracle, wet_measure

SEED_ENV = "WETSIM_SEED"
DEFAULT_SEED = 20240917
Z_MAX = 4.0
SIGMAS = 3.0

SIMULATE_HEADER = ["n", "mean", "stderr", "trials", "seed"]
WET_HEADER = ["t", "w"]
FIGURE1_HEADER = ["n", "w", "n_w", "missing_mean", "missing_stderr", "f0_mean", "f0_stderr"]
CHECK_HEADER = ["check", "measure", "n", "inequality", "value", "bound", "margin", "status"]


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, bounds.ExactLog2):
        x = x.to_float()
    return format(float(x), ".17g")


# --- measure specs --------------------------------------------------------

_SPEC_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def parse_measure(spec: str) -> Measure:
    """Build a measure from ``kind`` or ``kind(arg, ...)``.

    Kinds: circle(r=1), two_circle(p, r_in, r_out), drop_sequence(i_max=40),
    disk(R=1), triangle(circumradius=1).
    """
    m = _SPEC_RE.match(spec or "")
    if not m:
        raise UsageError(f"bad measure spec {spec!r}")
    kind, argstr = m.group(1), m.group(2)
    try:
        args = [float(a) for a in argstr.split(",")] if argstr and argstr.strip() else []
    except ValueError:
        raise UsageError(f"bad arguments in measure spec {spec!r}") from None
    try:
        if kind == "circle" and len(args) <= 1:
            return single_circle(*args)
        if kind == "two_circle" and len(args) == 3:
            return two_circle_drop(*args)
        if kind == "drop_sequence" and len(args) <= 1:
            return DropSequence(*(int(a) for a in args))
        if kind == "disk" and len(args) <= 1:
            return UniformDisk(*args)
        if kind == "triangle" and len(args) <= 1:
            return equilateral_triangle_boundary(*args)
    except ValueError as e:
        raise UsageError(f"invalid measure {spec!r}: {e}") from None
    raise UsageError(f"unknown measure {spec!r}; expected circle, two_circle(p,r_in,r_out), "
                     "drop_sequence, disk(R) or triangle")


# --- run configuration ----------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """Settings of a ``simulate`` run; stored as flat ``key=value`` lines.

    Keys: measure, quantity, n_min, n_max, points, trials, seed, out, plot,
    workers. Blank lines and lines starting with # are ignored.
    """

    measure: str = "two_circle(0.01,1,2)"
    quantity: str = "missing_mass"
    n_min: int = 10
    n_max: int = 10000
    points: int = 20
    trials: int = 1000
    seed: int = DEFAULT_SEED
    out: str = "-"
    plot: bool = False
    workers: int = 1

    def validate(self) -> "RunConfig":
        parse_measure(self.measure)
        try:
            montecarlo.Quantity(self.quantity)
        except ValueError:
            raise UsageError(f"unknown quantity {self.quantity!r}") from None
        if self.n_min < 1 or self.n_max < self.n_min or self.points < 1:
            raise UsageError("need 1 <= n_min <= n_max and points >= 1")
        if self.trials < 1 or self.workers < 1:
            raise UsageError("trials and workers must be >= 1")
        return self

    def serialize(self) -> str:
        return "".join(f"{f.name}={_cfg_str(getattr(self, f.name))}\n"
                       for f in dataclasses.fields(self))

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if not sep or key not in types:
                raise UsageError(f"config line {lineno}: unknown entry {raw!r}")
            values[key] = _cfg_value(types[key], val, lineno)
        return cls(**values)

    def replace(self, **overrides) -> "RunConfig":
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})


def _cfg_str(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _cfg_value(typ: str, val: str, lineno: int):
    try:
        if typ == "int":
            return int(val)
        if typ == "bool":
            low = val.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(val)
            return low in ("true", "1", "yes")
        return val
    except ValueError:
        raise UsageError(f"config line {lineno}: bad {typ} value {val!r}") from None


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


# --- output helpers -------------------------------------------------------

def _write_csv(path: str | None, header: list[str], rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in r])
    text = buf.getvalue()
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(path).write_text(text)


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _check_row(check, measure, n, inequality, value, bound, ge=True, strict=False):
    """One report row; the inequality holds when margin >= 0 (> 0 if strict)."""
    margin = (value - bound) if ge else (bound - value)
    ok = margin > 0 if strict else margin >= 0
    return [check, measure, n, inequality, value, bound, margin, "PASS" if ok else "FAIL"]


def _finish(rows, out) -> int:
    _write_csv(out, CHECK_HEADER, rows)
    failed = [r for r in rows if r[-1] == "FAIL"]
    for r in failed:
        _progress("FAIL," + ",".join(fmt(v) if not isinstance(v, str) else v for v in r[:-1]))
    _progress("PASS" if not failed else f"FAIL ({len(failed)} of {len(rows)} rows)")
    return 0 if not failed else 1


def _grid(args) -> list[int]:
    if getattr(args, "n", None):
        return sorted(set(args.n))
    return montecarlo.log_grid(args.n_min, args.n_max, args.points)


# --- subcommands ----------------------------------------------------------

def cmd_wet(args) -> int:
    m = parse_measure(args.measure)
    if args.t:
        ts = list(args.t)
    else:
        ts = [float(x) for x in np.geomspace(args.t_min, args.t_max, args.points)]
    if any(not 0.0 <= t <= 1.0 for t in ts):
        raise UsageError("t values must lie in [0, 1]")
    rows = []
    if args.oracle:
        rng = montecarlo.trial_rng(args.seed, 0, stream=7)
        for t in ts:
            rows.append([t, mc_wet_oracle(m, t, args.directions, args.samples, rng)])
    else:
        try:
            rows = [[t, wet_measure(m, t)] for t in ts]
        except UnsupportedMeasure as e:
            raise UsageError(f"no exact w(t) for {type(m).__name__}; "
                             "run `wet --oracle` for a Monte Carlo estimate") from None
    _write_csv(args.out, WET_HEADER, rows)
    return 0


def cmd_simulate(args) -> int:
    cfg = RunConfig(seed=default_seed())
    if args.config:
        try:
            cfg = RunConfig.parse(Path(args.config).read_text())
        except OSError as e:
            raise UsageError(f"cannot read config: {e}") from None
    cfg = cfg.replace(measure=args.measure, quantity=args.quantity, n_min=args.n_min,
                      n_max=args.n_max, points=args.points, trials=args.trials,
                      seed=args.seed, out=args.out, plot=args.plot or None,
                      workers=args.workers).validate()
    if args.save_config:
        Path(args.save_config).write_text(cfg.serialize())
    m = parse_measure(cfg.measure)
    grid = montecarlo.log_grid(cfg.n_min, cfg.n_max, cfg.points)
    results = []
    for k, n in enumerate(grid, 1):
        r = montecarlo.estimate(m, n, cfg.trials, cfg.seed, cfg.quantity, workers=cfg.workers)
        results.append(r)
        _progress(f"simulate: n={n} ({k}/{len(grid)}) mean={r.mean:.6g}")
    _write_csv(cfg.out, SIMULATE_HEADER,
               [[r.n, r.mean, r.stderr, r.trials, r.seed] for r in results])
    if cfg.plot:
        if cfg.out == "-":
            raise UsageError("plot needs a file --out")
        ax = svg.Axes(title=f"{cfg.quantity}, {cfg.measure}", xlabel="n", ylabel=cfg.quantity,
                      logx=True, logy=all(r.mean > 0 for r in results))
        ax.points("Monte Carlo", [r.n for r in results], [r.mean for r in results],
                  [r.stderr for r in results])
        Path(cfg.out).with_suffix(".svg").write_text(svg.render([ax]))
    return 0


def _analytic_grid(n_min: int, n_max: int, m: Measure) -> list[int]:
    dense = set(montecarlo.log_grid(n_min, n_max, 400))
    # put both sides of every step of n -> w(1/n) on the curve
    if isinstance(m, ConcentricCircles):
        from .wetpart import circle_thresholds
        for thr in circle_thresholds(m):
            if thr > 0:
                edge = int(math.floor(1.0 / thr * (1 + 1e-12)))
                dense.update(k for k in (edge, edge + 1) if n_min <= k <= n_max)
    return sorted(dense)


def cmd_figure1(args) -> int:
    if args.n_min < 1 or args.n_max < args.n_min or args.points < 1:
        raise UsageError("empty or invalid n-grid")
    grid = montecarlo.log_grid(args.n_min, args.n_max, args.points)
    m = two_circle_drop(args.p, 1.0, args.ratio)
    rows = montecarlo.figure1_curves(
        args.p, args.ratio, grid, args.trials, args.seed, workers=args.workers,
        progress=lambda n: _progress(f"figure1: n={n} done"))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(str(out_dir / "figure1.csv"), FIGURE1_HEADER,
               [[r.n, r.w, r.n_w, r.missing_mean, r.missing_stderr, r.f0_mean, r.f0_stderr]
                for r in rows])
    dense = _analytic_grid(args.n_min, args.n_max, m)
    w_dense = [wet_measure(m, 1.0 / n) for n in dense]
    top = svg.Axes(title=f"two circles, p={args.p:g}, ratio {args.ratio:g}", xlabel="n",
                   ylabel="E[1 - mu(P_n)]", logx=True)
    top.line("w(1/n)", dense, w_dense)
    top.points("Monte Carlo", [r.n for r in rows], [r.missing_mean for r in rows],
               [r.missing_stderr for r in rows])
    bottom = svg.Axes(title="vertices", xlabel="n", ylabel="E[f0(P_n)]", logx=True, logy=True)
    bottom.line("n w(1/n)", dense, [n * w for n, w in zip(dense, w_dense)])
    bottom.points("Monte Carlo", [r.n for r in rows], [r.f0_mean for r in rows],
                  [r.f0_stderr for r in rows])
    (out_dir / "figure1_top.svg").write_text(svg.render([top]))
    (out_dir / "figure1_bottom.svg").write_text(svg.render([bottom]))
    _progress(f"figure1: wrote {out_dir}/figure1.csv, figure1_top.svg, figure1_bottom.svg")
    return 0


DEFAULT_T2_MEASURES = ["circle", "two_circle(0.01,1,2)", "disk(1)", "drop_sequence"]


def cmd_theorem2(args) -> int:
    specs = args.measure or DEFAULT_T2_MEASURES
    grid = _grid(args)
    if grid[0] < 2:
        raise UsageError("theorem2-check needs n >= 2")
    rows = []
    for spec in specs:
        m = parse_measure(spec)
        report = bounds.theorem2_envelopes(m, grid, args.d)
        for env in report.rows:
            r = montecarlo.estimate(m, env.n, args.trials, args.seed, "missing_mass",
                                    workers=args.workers)
            rows.append(_check_row("lower", spec, env.n, "mean + 3 se >= w(1/n)/4",
                                   r.mean + SIGMAS * r.stderr, env.lower))
            if env.valid:
                rows.append(_check_row("upper", spec, env.n,
                                       "mean - 3 se <= w(4 ln n/n) + eps_2(n)/n",
                                       r.mean - SIGMAS * r.stderr, env.upper, ge=False))
            _progress(f"theorem2-check: {spec} n={env.n} mean={r.mean:.6g}")
    return _finish(rows, args.out)


def theorem3_rows(i: int, i_max: int = 60, wet_max: int = 20):
    rows = []
    for k in range(4, i_max + 1):
        led = bounds.theorem3_ledger(k)
        rows.append(_check_row("chain", "drop_sequence", k,
                               "2^-i (1 + 2^(1-i) i) < sqrt(2)/(pi i) and log2 n_i/n_i < s_i sqrt(2)/(pi i)",
                               float(led.chain_check), 1.0))
        if k <= wet_max:
            rows.append(_check_row("wet", "drop_sequence", k, "w(log2 n_i/n_i) == s_i",
                                   float(led.wet_ok), 1.0))
    led = bounds.theorem3_ledger(i)
    rows.append(_check_row("bracket", "drop_sequence", i,
                           "(p_i/s_i)(1 - s_{i+1})^(n_i+1) > 1/2", led.bracket, 0.5))
    return rows


def cmd_theorem3(args) -> int:
    if not 1 <= args.i <= 60:
        raise UsageError("--i must lie in [1, 60]")
    rows = theorem3_rows(args.i)
    if args.trials > 0:
        if args.i > 4:
            raise UsageError(f"n_{args.i} + 1 samples per trial is out of reach; "
                             "use --trials 0 for the analytic checks")
        n = int(bounds.drop_n(args.i).to_float()) + 1
        thr = bounds.f0_threshold(args.i).to_float()

        def report(done, total):
            _progress(f"theorem3-check: {done}/{total} trials")

        r = montecarlo.estimate(DropSequence(), n, args.trials, args.seed, "f0",
                                workers=args.workers, progress=report)
        rows.append(_check_row("f0", "drop_sequence", n, "mean - 3 se > (n_i + 1) s_i / 2",
                               r.mean - SIGMAS * r.stderr, thr, strict=True))
    return _finish(rows, args.out)


def cmd_epsnet(args) -> int:
    spec = args.measure
    m = parse_measure(spec)
    rows = []
    delta = args.d + 2
    for n in sorted(set(args.n)):
        if n < 2:
            raise UsageError("epsnet needs n >= 2")
        N = n * math.ceil(math.log(n))
        eps = delta * math.log(n) / n
        if not 0.0 < eps < 1.0 or N <= n:
            raise UsageError(f"eps = {eps:.4g} out of (0, 1) at n = {n}")
        r = montecarlo.epsnet_failure_rate(m, n, eps, args.trials, args.seed, workers=args.workers)
        bound = bounds.kpw_failure_bound(N, n, eps, args.d)
        rows.append(_check_row("epsnet", spec, n,
                               "failure rate <= 2 pi_H(N) (1 - n/N)^((N-n) eps - 1)",
                               r.mean, bound, ge=False))
        _progress(f"epsnet: n={n} rate={r.mean:.6g} bound={bound:.6g}")
    return _finish(rows, args.out)


def cmd_efron(args) -> int:
    specs = args.measure or ["two_circle(0.01,1,2)"]
    rows = []
    for spec in specs:
        m = parse_measure(spec)
        for n in sorted(set(args.n)):
            res = montecarlo.efron_check(m, n, args.trials, args.seed, boundary=args.boundary,
                                         workers=args.workers)
            label = "efron_boundary" if args.boundary else "efron"
            rows.append(_check_row(label, spec, n, "|z| <= z_max", abs(res.z), args.z_max,
                                   ge=False))
            _progress(f"efron-check: {spec} n={n} z={res.z:.4g}")
    return _finish(rows, args.out)


# --- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wetsim", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True, workers=True):
        sp.add_argument("--out", default="-", help="CSV output path (default stdout)")
        if seed:
            sp.add_argument("--seed", type=int, default=None,
                            help=f"base seed (default ${SEED_ENV} or {DEFAULT_SEED})")
        if workers:
            sp.add_argument("--workers", type=int, default=1, help="worker processes")

    sp = sub.add_parser("wet", help="tabulate w(t)")
    sp.add_argument("--measure", default="two_circle(0.01,1,2)")
    sp.add_argument("--t", type=float, nargs="+", help="explicit t values")
    sp.add_argument("--t-min", type=float, default=1e-4)
    sp.add_argument("--t-max", type=float, default=0.5)
    sp.add_argument("--points", type=int, default=30)
    sp.add_argument("--oracle", action="store_true", help="Monte Carlo wet-part oracle")
    sp.add_argument("--directions", type=int, default=720)
    sp.add_argument("--samples", type=int, default=100000)
    common(sp, workers=False)
    sp.set_defaults(func=cmd_wet)

    sp = sub.add_parser("simulate", help="Monte Carlo estimates over an n-grid")
    sp.add_argument("--config", help="key=value run configuration file")
    sp.add_argument("--save-config", help="write the effective configuration here")
    sp.add_argument("--measure")
    sp.add_argument("--quantity", choices=[q.value for q in montecarlo.Quantity if
                                           q is not montecarlo.Quantity.EPSNET_FAILURE])
    sp.add_argument("--n-min", type=int)
    sp.add_argument("--n-max", type=int)
    sp.add_argument("--points", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--plot", action="store_true", help="also write <out>.svg")
    sp.add_argument("--out")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("figure1", help="two-circle drop curves, CSV and SVG")
    sp.add_argument("--p", type=float, default=0.01)
    sp.add_argument("--ratio", type=float, default=2.0)
    sp.add_argument("--n-min", type=int, default=10)
    sp.add_argument("--n-max", type=int, default=10000)
    sp.add_argument("--points", type=int, default=30)
    sp.add_argument("--trials", type=int, default=10000)
    sp.add_argument("--out-dir", default=".")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_figure1)

    sp = sub.add_parser("theorem2-check", help="both envelopes of E[1 - mu(P_n)]")
    sp.add_argument("--measure", action="append", help="repeatable; default: all four radial")
    sp.add_argument("--n", type=int, nargs="+", help="explicit n values")
    sp.add_argument("--n-min", type=int, default=2)
    sp.add_argument("--n-max", type=int, default=10000)
    sp.add_argument("--points", type=int, default=20)
    sp.add_argument("--trials", type=int, default=10000)
    sp.add_argument("--d", type=int, default=2, help=argparse.SUPPRESS)
    common(sp)
    sp.set_defaults(func=cmd_theorem2)

    sp = sub.add_parser("theorem3-check", help="drop-sequence ledger and f0 at n_i + 1")
    sp.add_argument("--i", type=int, default=4)
    sp.add_argument("--trials", type=int, default=200, help="0 skips the Monte Carlo part")
    common(sp)
    sp.set_defaults(func=cmd_theorem3)

    sp = sub.add_parser("epsnet", help="floating-body containment vs the KPW bound")
    sp.add_argument("--measure", default="two_circle(0.01,1,2)")
    sp.add_argument("--n", type=int, nargs="+", default=[100, 1000])
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--d", type=int, default=2, help=argparse.SUPPRESS)
    common(sp)
    sp.set_defaults(func=cmd_epsnet)

    sp = sub.add_parser("efron-check", help="Efron identity z-scores")
    sp.add_argument("--measure", action="append", help="repeatable")
    sp.add_argument("--n", type=int, nargs="+", default=[10, 50, 200])
    sp.add_argument("--trials", type=int, default=10000)
    sp.add_argument("--boundary", action="store_true",
                    help="f0_bar against the open-interior mass")
    sp.add_argument("--z-max", type=float, default=Z_MAX)
    common(sp)
    sp.set_defaults(func=cmd_efron)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", "absent") is None and args.command != "simulate":
            args.seed = default_seed()
        return int(args.func(args) or 0)
    except UsageError as e:
        print(f"wetsim {args.command}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
