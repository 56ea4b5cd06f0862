"""Sampleable planar probability measures with exact halfplane measures.

All measures here give every line measure zero, so a closed halfplane and its
open counterpart have the same mass and one code path serves both.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exactlog import ExactLog2
from .geom2d import (ConvexPolygon, Halfplane, HullKind, Point2, convex_hull, orientation,
                     segment_area)

DEFAULT_I_MAX = 40
# relative size below which further drop-sequence series terms are dropped
SERIES_RTOL = 1e-18
# triangle-boundary samples put the edge parameter on a 2**-26 grid
_EDGE_GRID_BITS = 26


class UnsupportedMeasure(TypeError):
    """Operation needs a rotationally symmetric (or circle-supported) measure."""


class Measure:
    """Base class. Subclasses implement ``sample`` and ``halfplane_measure``."""

    symmetric = False

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def halfplane_measure(self, h: Halfplane) -> float:
        raise NotImplementedError

    def halfplane_measures(self, normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
        """Vectorized ``halfplane_measure`` for unit normals (k, 2) and offsets (k,)."""
        return np.array([self.halfplane_measure(Halfplane(tuple(nv), o))
                         for nv, o in zip(normals, offsets)])

    def total_mass(self) -> float:
        return 1.0

    def profile(self, rho):
        raise UnsupportedMeasure(f"{type(self).__name__} is not rotationally symmetric")


class RadialMeasure(Measure):
    """Rotationally symmetric about the origin; halfplane mass depends only on
    the signed distance of its boundary line."""

    symmetric = True
    support_radius: float

    def profile(self, rho):
        """Mass of a closed halfplane whose boundary is at distance ``rho`` beyond the origin.

        ``rho`` may be negative (origin inside the halfplane) and may be an array.
        """
        rho = np.asarray(rho, dtype=float)
        pos = self._profile_nonneg(np.abs(rho))
        out = np.where(rho >= 0, pos, 1.0 - pos)
        return float(out) if out.ndim == 0 else out

    def _profile_nonneg(self, rho: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def halfplane_measure(self, h: Halfplane) -> float:
        return float(self.profile(h.offset))

    def halfplane_measures(self, normals, offsets):
        return np.asarray(self.profile(np.asarray(offsets, dtype=float)))


@dataclass(frozen=True, eq=False)
class ConcentricCircles(RadialMeasure):
    """Uniform measures on concentric circles about the origin, mixed by weight."""

    radii: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        r = np.array(self.radii, dtype=float).reshape(-1)
        w = np.array(self.weights, dtype=float).reshape(-1)
        if len(r) == 0 or len(r) != len(w):
            raise ValueError("need matching, nonempty radii and weights")
        if not (r > 0).all() or not (np.diff(r) > 0).all():
            raise ValueError("radii must be positive and strictly increasing")
        if (w < 0).any() or abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        r.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "_cum", np.cumsum(w))

    @property
    def support_radius(self) -> float:
        return float(self.radii[-1])

    def total_mass(self) -> float:
        return math.fsum(self.weights)

    def tail_mass(self, j: int) -> float:
        """Mass of circles j, j+1, ... (0-based)."""
        return math.fsum(self.weights[j:])

    def _profile_nonneg(self, rho):
        ratio = rho[..., None] / self.radii
        frac = np.arccos(np.clip(ratio, -1.0, 1.0)) / math.pi
        return np.where(ratio < 1.0, frac, 0.0) @ self.weights

    def circle_index(self, u: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._cum, u, side="right")
        return np.minimum(idx, len(self.radii) - 1)

    def sample(self, rng, n):
        idx = self.circle_index(rng.random(n))
        theta = rng.random(n) * (2.0 * math.pi)
        r = self.radii[idx]
        return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def single_circle(radius: float = 1.0) -> ConcentricCircles:
    return ConcentricCircles([radius], [1.0])


def two_circle_drop(p: float, r_in: float, r_out: float) -> ConcentricCircles:
    """Inner circle with mass 1 - p, outer circle with mass p."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    if not 0.0 < r_in < r_out:
        raise ValueError("need 0 < r_in < r_out")
    return ConcentricCircles([r_in, r_out], [1.0 - p, p])


# ---- drop sequence: s_i = 4 * 2**(-2**i), r_i = 1 - 1/(i+1) ----

def drop_log2_s(i: int) -> int:
    """Exact log2 of the tail mass s_i."""
    return 2 - 2 ** i


def drop_s(i: int) -> ExactLog2:
    return ExactLog2.pow2(drop_log2_s(i))


def drop_p(i: int) -> ExactLog2:
    """Mass of circle i, s_i - s_{i+1} = s_i (1 - 2**(-2**i))."""
    factor = 1.0 - math.ldexp(1.0, -(2 ** i)) if i < 11 else 1.0
    return drop_s(i) * factor


def drop_radius(i: int) -> float:
    return 1.0 - 1.0 / (i + 1)


def _frexp_key(u):
    # u > 2**E  <=>  key > 2*E, with u = m * 2**e and 0.5 <= m < 1
    m, e = np.frexp(u)
    return 2 * (e.astype(np.int64) - 1) + (m > 0.5)


def drop_sequence_index(u, i_max: int = DEFAULT_I_MAX):
    """Smallest i >= 1 with u > s_{i+1}, decided exactly from the binary exponent of u.

    Ties u == s_{i+1} go to the deeper circle. Accepts a scalar or an array of
    values in (0, 1]; results are capped at ``i_max``.
    """
    arr = np.asarray(u, dtype=float)
    if ((arr <= 0) | (arr > 1)).any():
        raise ValueError("u must lie in (0, 1]")
    key = _frexp_key(arr)
    # thresholds 2*log2(s_{i+1}) for i = 1..i_max-1, decreasing in i
    thr = np.array([2 * drop_log2_s(i + 1) for i in range(1, i_max)], dtype=np.int64)
    deeper = np.searchsorted(-thr, -key, side="right")
    out = np.minimum(1 + deeper, i_max)
    return int(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class DropSequence(ConcentricCircles):
    """Infinitely many circles r_i = 1 - 1/(i+1) with tail masses s_i = 4 * 2**(-2**i).

    The sampler and the float-valued queries use circles 1..``i_max``; the
    ``*_log`` methods evaluate the untruncated series in big-exponent form.
    """

    radii: np.ndarray = field(default=None, repr=False)
    weights: np.ndarray = field(default=None, repr=False)
    i_max: int = DEFAULT_I_MAX

    def __post_init__(self):
        idx = range(1, self.i_max + 1)
        r = [drop_radius(i) for i in idx]
        w = [drop_p(i).to_float() for i in idx]
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "weights", w)
        super().__post_init__()

    def sample(self, rng, n):
        u = 1.0 - rng.random(n)
        idx = drop_sequence_index(u, self.i_max) - 1
        theta = rng.random(n) * (2.0 * math.pi)
        r = self.radii[idx]
        return np.column_stack((r * np.cos(theta), r * np.sin(theta)))

    def profile_log(self, rho: float) -> ExactLog2:
        """Mass of the halfplane at distance ``rho`` >= 0, as an ExactLog2.

        The series over circles beyond ``rho`` is cut once a term drops below
        ``SERIES_RTOL`` of the running sum.
        """
        if rho < 0:
            raise ValueError("profile_log takes rho >= 0")
        if rho >= 1.0:
            return ExactLog2()
        k = 1
        while drop_radius(k) <= rho:
            k += 1
        total = ExactLog2()
        j = k
        while True:
            frac = math.acos(rho / drop_radius(j)) / math.pi
            ratio = drop_p(j) / drop_s(k)
            term = ratio * frac
            if not total.is_zero() and term < total * SERIES_RTOL:
                break
            total = total + term
            j += 1
        return drop_s(k) * total

    def tangent_mass_log(self, i: int) -> ExactLog2:
        """Mass of a closed halfplane tangent to circle i."""
        return self.profile_log(drop_radius(i))


@dataclass(frozen=True)
class UniformDisk(RadialMeasure):
    R: float = 1.0

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("radius must be positive")

    @property
    def support_radius(self) -> float:
        return self.R

    def _profile_nonneg(self, rho):
        return segment_area(self.R, rho) / (math.pi * self.R ** 2)

    def sample(self, rng, n):
        r = self.R * np.sqrt(rng.random(n))
        theta = rng.random(n) * (2.0 * math.pi)
        return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


@dataclass(frozen=True, eq=False)
class PolygonBoundaryMeasure(Measure):
    """Arc-length uniform measure on the boundary of a convex polygon.

    Edge positions are drawn on a 2**-26 grid, so when the vertices sit on a
    2**-24 grid every sample lies exactly on its edge in floating point.
    """

    polygon: ConvexPolygon

    def __post_init__(self):
        if self.polygon.kind is not HullKind.FULL:
            raise ValueError("support polygon must be full-dimensional")
        v = self.polygon.vertices
        d = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(d[:, 0], d[:, 1])
        object.__setattr__(self, "_starts", v)
        object.__setattr__(self, "_deltas", d)
        object.__setattr__(self, "_lengths", lengths)
        object.__setattr__(self, "_cum", np.cumsum(lengths) / lengths.sum())

    @property
    def perimeter(self) -> float:
        return float(self._lengths.sum())

    @property
    def edge_lengths(self) -> np.ndarray:
        return self._lengths

    def sample(self, rng, n):
        e = np.minimum(np.searchsorted(self._cum, rng.random(n), side="right"),
                       len(self._lengths) - 1)
        t = rng.integers(0, 2 ** _EDGE_GRID_BITS, n) * 2.0 ** -_EDGE_GRID_BITS
        return self._starts[e] + t[:, None] * self._deltas[e]

    def halfplane_measures(self, normals, offsets):
        normals = np.asarray(normals, dtype=float).reshape(-1, 2)
        offsets = np.asarray(offsets, dtype=float).reshape(-1)
        # f(t) = n.(a + t d) - offset along each edge, linear in t
        fa = normals @ self._starts.T - offsets[:, None]
        slope = normals @ self._deltas.T
        with np.errstate(divide="ignore", invalid="ignore"):
            root = -fa / slope
        lo = np.where(slope > 0, np.clip(root, 0, 1), 0.0)
        hi = np.where(slope < 0, np.clip(root, 0, 1), 1.0)
        flat = slope == 0
        inside_flat = fa >= 0
        frac = np.where(flat, inside_flat.astype(float), np.maximum(hi - lo, 0.0))
        return frac @ self._lengths / self.perimeter

    def halfplane_measure(self, h: Halfplane) -> float:
        return float(self.halfplane_measures(np.array([h.normal]), np.array([h.offset]))[0])


def _snap(x: float, bits: int = 24) -> float:
    return round(x * 2 ** bits) / 2 ** bits


def equilateral_triangle_boundary(circumradius: float = 1.0) -> PolygonBoundaryMeasure:
    """Boundary of an equilateral triangle centred at the origin.

    Vertices are rounded to a 2**-24 grid (relative error ~1e-8) so that
    boundary samples are exactly collinear with their edge.
    """
    pts = [(_snap(circumradius * math.cos(a)), _snap(circumradius * math.sin(a)))
           for a in (math.pi / 2, math.pi / 2 + 2 * math.pi / 3, math.pi / 2 + 4 * math.pi / 3)]
    poly = convex_hull(pts)
    assert all(orientation(*poly.vertices[[i, (i + 1) % 3, (i + 2) % 3]].tolist()) == 1
               for i in range(3))
    return PolygonBoundaryMeasure(poly)


def sample(m: Measure, rng: np.random.Generator) -> Point2:
    x, y = m.sample(rng, 1)[0]
    return Point2(float(x), float(y))


def sample_points(m: Measure, rng: np.random.Generator, n: int) -> np.ndarray:
    return m.sample(rng, n)


def halfplane_measure(m: Measure, h: Halfplane) -> float:
    return m.halfplane_measure(h)


def support_total(m: Measure) -> float:
    return m.total_mass()


def measure_of_halfplane_profile(m: Measure, rho) -> float:
    if not m.symmetric:
        raise UnsupportedMeasure(f"{type(m).__name__} is not rotationally symmetric")
    return m.profile(rho)
