"""Wet-part measure w(t) for rotationally symmetric measures, its step
structure on circle-supported measures, and a Monte Carlo oracle.

For a symmetric measure the cheapest halfplane containing x is the one whose
boundary is tangent at distance |x|, so x is wet iff profile(|x|) <= t and
the wet part is the outside of the radius rho*(t) = inf{rho : profile(rho) <= t}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .exactlog import ExactLog2
from .geom2d import segment_area
from .measures import (ConcentricCircles, DropSequence, Measure, UniformDisk,
                       UnsupportedMeasure, drop_s)

# t within this relative distance of a step threshold counts as reaching it;
# thresholds such as p*arccos(1/2)/pi = 1/300 carry rounding of a few ulp
THRESHOLD_RTOL = 1e-12
# cap on the drop-sequence circle index searched by drop_wet_measure
_DROP_SEARCH_MAX = 62
# relative rounding allowance on |x| in the Monte Carlo oracle
_RADIUS_RTOL = 1e-15


def _require_symmetric(m: Measure):
    if not m.symmetric:
        raise UnsupportedMeasure(
            f"exact wet part needs a rotationally symmetric measure, got {type(m).__name__}; "
            "use the Monte Carlo oracle instead")


def disk_cap_area(R: float, rho):
    """Area of the cap of the radius-R disk beyond a chord at distance rho (0 for rho > R)."""
    if np.any(np.asarray(rho) < 0):
        raise ValueError("rho must be nonnegative")
    return segment_area(R, rho)


def circle_thresholds(m: ConcentricCircles) -> np.ndarray:
    """Mass of the halfplane tangent to each circle, innermost first."""
    return np.asarray(m.profile(m.radii), dtype=float).reshape(-1)


def rho_star(m: Measure, t: float) -> float:
    """inf{rho >= 0 : profile(rho) <= t}; 0 for t >= 1/2, the support radius for t <= 0."""
    _require_symmetric(m)
    if t >= 0.5:
        return 0.0
    R = m.support_radius
    if t <= 0:
        return R
    if isinstance(m, ConcentricCircles):
        thr = circle_thresholds(m)
        # profile is strictly decreasing on [0, R]; bracket between consecutive radii
        j = int(np.argmax(thr <= t))
        lo = 0.0 if j == 0 else float(m.radii[j - 1])
        hi = float(m.radii[j])
        if m.profile(lo) <= t:
            return lo
    else:
        lo, hi = 0.0, R
    return brentq(lambda r: m.profile(r) - t, lo, hi, xtol=1e-300, rtol=1e-14)


def drop_wet_measure(t, seq: DropSequence | None = None) -> ExactLog2:
    """w(t) for the untruncated drop sequence, with t and the result in ExactLog2.

    Circle k is wet iff the halfplane tangent to it has mass <= t, and then so
    is every circle beyond it, giving w = s_k for the first such k.
    """
    seq = seq or DropSequence()
    t = ExactLog2.coerce(t)
    if t >= 0.5:
        return ExactLog2.from_float(1.0)
    slack = t * (1.0 + THRESHOLD_RTOL)
    for k in range(1, _DROP_SEARCH_MAX + 1):
        if seq.tangent_mass_log(k) <= slack:
            return drop_s(k)
    return ExactLog2()


def wet_measure(m: Measure, t):
    """Mass of the wet part W_t for a rotationally symmetric measure.

    A circle whose tangent halfplane has mass exactly t is wet (the larger step
    value is taken at a threshold). For circle measures the outermost circle
    has tangent mass 0 and so is wet already at t = 0.
    """
    _require_symmetric(m)
    if isinstance(m, DropSequence):
        if isinstance(t, ExactLog2):
            return drop_wet_measure(t, m)
        return drop_wet_measure(float(t), m).to_float()
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    if t >= 0.5:
        return 1.0
    if isinstance(m, ConcentricCircles):
        wet = circle_thresholds(m) <= t * (1.0 + THRESHOLD_RTOL)
        return math.fsum(m.weights[wet])
    if isinstance(m, UniformDisk):
        if t == 0.0:
            return 0.0
        return 1.0 - (rho_star(m, t) / m.R) ** 2
    raise UnsupportedMeasure(type(m).__name__)


def closed_wet_measure(m: Measure, t):
    """Mass of the closure of W_t; equal to ``wet_measure`` since lines are null here."""
    return wet_measure(m, t)


def w1(t: float) -> float:
    """Wet-part measure of any non-atomic measure on the line."""
    return min(2.0 * t, 1.0)


@dataclass(frozen=True)
class WetProfile:
    """Step function t -> w(t) on a circle-supported measure.

    ``steps`` are (threshold, value) pairs sorted by threshold; w(t) equals the
    value of the last step whose threshold is <= t. ``radial`` pairs each
    threshold with rho*(threshold), the radius of the circle that becomes wet.
    """

    steps: tuple[tuple[float, float], ...]
    radial: tuple[tuple[float, float], ...]

    def value(self, t: float) -> float:
        out = 0.0
        for thr, val in self.steps:
            if thr <= t * (1.0 + THRESHOLD_RTOL):
                out = val
        return 1.0 if t >= 0.5 else out

    @property
    def thresholds(self) -> list[float]:
        return [thr for thr, _ in self.steps]


def wet_steps(m: ConcentricCircles) -> WetProfile:
    if not isinstance(m, ConcentricCircles):
        raise UnsupportedMeasure("wet_steps needs a circle-supported measure")
    thr = circle_thresholds(m)
    tails = [m.tail_mass(j) for j in range(len(m.radii))]
    order = np.argsort(thr, kind="stable")
    steps = []
    radial = []
    for j in order:
        if m.weights[j] == 0.0 and j != 0:
            continue
        steps.append((float(thr[j]), float(tails[j])))
        radial.append((float(thr[j]), float(m.radii[j])))
    return WetProfile(tuple(steps), tuple(radial))


def mc_wet_oracle(m: Measure, t: float, direction_count: int, sample_count: int,
                  rng: np.random.Generator, chunk: int = 2000) -> float:
    """Fraction of fresh samples x that lie in some halfplane of mass <= t.

    Symmetric measures only need the radial tangent halfplane at x. Otherwise
    the minimum is taken over ``direction_count`` outward normals.
    """
    if direction_count < 360:
        raise ValueError("direction_count must be at least 360")
    pts = m.sample(rng, sample_count)
    if m.symmetric:
        r = np.hypot(pts[:, 0], pts[:, 1])
        safe = np.where(r > 0, r, 1.0)
        normals = np.where(r[:, None] > 0, pts / safe[:, None], np.array([1.0, 0.0]))
        # |x| of a point drawn on a circle can round just below the radius, where
        # arccos turns a 1e-16 error into 1e-8 of mass; nudge it outward
        mass = m.halfplane_measures(normals, r * (1.0 + _RADIUS_RTOL))
        return float(np.count_nonzero(mass <= t)) / sample_count
    theta = np.arange(direction_count) * (2.0 * math.pi / direction_count)
    dirs = np.column_stack((np.cos(theta), np.sin(theta)))
    wet = 0
    for start in range(0, sample_count, chunk):
        block = pts[start:start + chunk]
        offs = block @ dirs.T  # (b, k)
        normals = np.broadcast_to(dirs, (len(block), direction_count, 2)).reshape(-1, 2)
        mass = m.halfplane_measures(normals, offs.reshape(-1)).reshape(len(block), -1)
        wet += int(np.count_nonzero(mass.min(axis=1) <= t))
    return wet / sample_count
