"""Monte Carlo estimates of E[1 - mu(P_n)], E[f0], E[f0_bar] and epsilon-net
failure rates, with per-trial counter-based random streams.

Trial ``t`` of seed ``s`` always draws from Philox keyed by (s, stream, t), so
any subset of trials can be recomputed, in any order or process, bit for bit.
"""
from __future__ import annotations

import enum
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels as K
from .geom2d import ConvexPolygon, HullKind, Location, as_points, convex_hull, locate, \
    origin_disk_in_polygon
from .hullstats import _f0_bar, hull_mass, interior_mass
from .measures import Measure, two_circle_drop
from .wetpart import rho_star, wet_measure

log = logging.getLogger(__name__)

STREAMING_THRESHOLD = 10 ** 6
STREAM_CHUNK = 2 ** 20
_MASK64 = (1 << 64) - 1


class Quantity(str, enum.Enum):
    MISSING_MASS = "missing_mass"
    INTERIOR_MISSING_MASS = "interior_missing_mass"
    F0 = "f0"
    F0_BAR = "f0_bar"
    EPSNET_FAILURE = "epsnet_failure"


def trial_rng(seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for one trial; ``stream`` separates paired estimates."""
    key = [seed & _MASK64, ((stream & 0xFFFF) << 48) | (trial & ((1 << 48) - 1))]
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class ExperimentResult:
    quantity: str
    n: int
    trials: int
    mean: float
    stderr: float
    seed: int

    def __post_init__(self):
        if self.trials < 1 or self.stderr < 0:
            raise ValueError("need trials >= 1 and stderr >= 0")


def summarize(values: Sequence[float]) -> tuple[float, float]:
    """Mean and standard error; exactly rounded sums, so the input order is irrelevant."""
    k = len(values)
    mean = math.fsum(values) / k
    if k < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (k - 1)
    return mean, math.sqrt(var / k)


class StreamingHull:
    """Convex hull maintained over a stream of point batches.

    Points strictly inside a disk inscribed in the current hull are dropped
    before the exact hull update; the rest go through the monotone chain with
    the current vertices.
    """

    def __init__(self):
        self._hull = ConvexPolygon(np.empty((0, 2)))
        self.count = 0

    @property
    def polygon(self) -> ConvexPolygon:
        return self._hull

    def add(self, points) -> ConvexPolygon:
        arr = as_points(points)
        self.count += len(arr)
        if len(arr) == 0:
            return self._hull
        px = np.ascontiguousarray(arr[:, 0])
        py = np.ascontiguousarray(arr[:, 1])
        hull = self._hull
        if hull.kind is HullKind.FULL:
            cx, cy = float(hull.xs.mean()), float(hull.ys.mean())
            r_in = K.inradius_about(hull.xs, hull.ys, cx, cy)
            scale = float(np.abs(hull.vertices).max()) + abs(cx) + abs(cy)
            r_safe = r_in - 1e-9 * scale
            if r_safe > 0:
                keep = K.outside_disk_mask(px, py, cx, cy, r_safe * r_safe)
                px, py = px[keep], py[keep]
        merged_x = np.concatenate((hull.xs, px))
        merged_y = np.concatenate((hull.ys, py))
        self._hull = ConvexPolygon(K.hull_vertices(merged_x, merged_y))
        return self._hull


def _check_size(n: int):
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n * 16 > sys.maxsize:
        raise OverflowError(f"n = {n} exceeds addressable memory")


def sample_hull(m: Measure, n: int, rng: np.random.Generator,
                chunk: int = STREAM_CHUNK) -> ConvexPolygon:
    """Hull of n fresh samples; streams in chunks above STREAMING_THRESHOLD."""
    _check_size(n)
    if n <= STREAMING_THRESHOLD:
        return convex_hull(m.sample(rng, n))
    sh = StreamingHull()
    left = n
    while left > 0:
        k = min(chunk, left)
        sh.add(m.sample(rng, k))
        left -= k
    return sh.polygon


def _streamed_f0_bar(m, n, hull, make_rng, chunk=STREAM_CHUNK) -> int:
    # regenerate the same points and count those not strictly inside
    if hull.kind is not HullKind.FULL:
        return n
    rng = make_rng()
    total, left = 0, n
    while left > 0:
        k = min(chunk, left)
        arr = m.sample(rng, k)
        total += int(K.count_not_inside(hull.xs, hull.ys,
                                        np.ascontiguousarray(arr[:, 0]),
                                        np.ascontiguousarray(arr[:, 1])))
        left -= k
    return total


def trial_value(m: Measure, n: int, quantity: Quantity, seed: int, trial: int,
                stream: int = 0, radius: float | None = None) -> float:
    quantity = Quantity(quantity)

    def make_rng():
        return trial_rng(seed, trial, stream)

    if quantity is Quantity.F0_BAR and n <= STREAMING_THRESHOLD:
        arr = m.sample(make_rng(), n)
        return float(_f0_bar(convex_hull(arr), arr))
    hull = sample_hull(m, n, make_rng())
    if quantity is Quantity.MISSING_MASS:
        return 1.0 - hull_mass(m, hull)
    if quantity is Quantity.INTERIOR_MISSING_MASS:
        return 1.0 - interior_mass(m, hull)
    if quantity is Quantity.F0:
        return float(len(hull))
    if quantity is Quantity.F0_BAR:
        return float(_streamed_f0_bar(m, n, hull, make_rng))
    if quantity is Quantity.EPSNET_FAILURE:
        if radius is None:
            raise ValueError("epsnet_failure needs a radius")
        if radius <= 0:
            return float(locate(hull, (0.0, 0.0)) is Location.OUTSIDE)
        return float(not origin_disk_in_polygon(hull, radius))
    raise ValueError(quantity)


def _run_block(args) -> list[float]:
    m, n, quantity, seed, stream, radius, lo, hi = args
    return [trial_value(m, n, quantity, seed, t, stream, radius) for t in range(lo, hi)]


def run_trials(m: Measure, n: int, trials: int, seed: int, quantity: Quantity,
               stream: int = 0, radius: float | None = None, workers: int = 1,
               progress: Callable[[int, int], None] | None = None) -> list[float]:
    """Per-trial values in trial order."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _check_size(n)
    block = max(1, min(1000, trials // max(1, 4 * workers)))
    jobs = [(m, n, quantity, seed, stream, radius, lo, min(lo + block, trials))
            for lo in range(0, trials, block)]
    values: list[float] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_block, jobs):
                values.extend(part)
                if progress:
                    progress(len(values), trials)
    else:
        for job in jobs:
            values.extend(_run_block(job))
            if progress:
                progress(len(values), trials)
    return values


def estimate(m: Measure, n: int, trials: int, seed: int, quantity, *, stream: int = 0,
             radius: float | None = None, workers: int = 1, progress=None) -> ExperimentResult:
    quantity = Quantity(quantity)
    vals = run_trials(m, n, trials, seed, quantity, stream, radius, workers, progress)
    mean, se = summarize(vals)
    return ExperimentResult(quantity.value, n, trials, mean, se, seed)


@dataclass(frozen=True)
class EfronResult:
    n: int
    z: float
    vertices: ExperimentResult
    missing: ExperimentResult

    @property
    def difference(self) -> float:
        return self.vertices.mean - self.n * self.missing.mean


def efron_check(m: Measure, n: int, trials: int, seed: int, boundary: bool = False,
                workers: int = 1) -> EfronResult:
    """z-score of E[f0(P_n)] - n (1 - E[mu(P_{n-1})]) from independent streams.

    With ``boundary=True`` the f0_bar / open-interior variant is checked.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    q_v = Quantity.F0_BAR if boundary else Quantity.F0
    q_m = Quantity.INTERIOR_MISSING_MASS if boundary else Quantity.MISSING_MASS
    vert = estimate(m, n, trials, seed, q_v, stream=1, workers=workers)
    miss = estimate(m, n - 1, trials, seed, q_m, stream=2, workers=workers)
    diff = vert.mean - n * miss.mean
    se = math.hypot(vert.stderr, n * miss.stderr)
    if se == 0.0:
        z = 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    else:
        z = diff / se
    return EfronResult(n, z, vert, miss)


def epsnet_failure_rate(m: Measure, n: int, eps: float, trials: int, seed: int,
                        workers: int = 1) -> ExperimentResult:
    """Frequency with which the hull misses part of the floating body R^2 minus W_eps.

    The floating body of a symmetric measure is the disk of radius rho*(eps);
    at rho* = 0 failure means the origin is outside the hull.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    radius = rho_star(m, eps)
    return estimate(m, n, trials, seed, Quantity.EPSNET_FAILURE, radius=radius,
                    workers=workers)


def log_grid(n_min: int, n_max: int, points: int) -> list[int]:
    """Distinct integers, roughly log-spaced over [n_min, n_max]."""
    if points < 1 or n_min < 1 or n_max < n_min:
        raise ValueError("need points >= 1 and 1 <= n_min <= n_max")
    if points == 1:
        return [n_min]
    raw = np.geomspace(n_min, n_max, points)
    return sorted({int(round(x)) for x in raw})


@dataclass(frozen=True)
class Figure1Row:
    n: int
    w: float
    n_w: float
    missing_mean: float
    missing_stderr: float
    f0_mean: float
    f0_stderr: float


def figure1_curves(p: float, ratio: float, n_grid: Sequence[int], trials: int, seed: int,
                   workers: int = 1, progress=None) -> list[Figure1Row]:
    """Analytic w(1/n), n w(1/n) and simulated E[1 - mu(P_n)], E[f0] for the two-circle drop."""
    if len(n_grid) == 0:
        raise ValueError("empty n-grid")
    m = two_circle_drop(p, 1.0, ratio)
    rows = []
    for n in n_grid:
        w = wet_measure(m, 1.0 / n)
        miss = estimate(m, n, trials, seed, Quantity.MISSING_MASS, stream=1, workers=workers)
        f0 = estimate(m, n, trials, seed, Quantity.F0, stream=2, workers=workers)
        rows.append(Figure1Row(n, w, n * w, miss.mean, miss.stderr, f0.mean, f0.stderr))
        if progress:
            progress(n)
    return rows
