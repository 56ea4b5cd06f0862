"""Planar primitives: orientation, convex hull, point location and circle/polygon
arc clipping.

The orientation predicate is exact; everything else runs in doubles.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np

from . import _kernels as K

TWO_PI = 2.0 * math.pi
ARC_MERGE_TOL = 1e-12


class Orientation(enum.IntEnum):
    CW = -1
    COLLINEAR = 0
    CCW = 1


class Location(enum.IntEnum):
    OUTSIDE = K.OUTSIDE
    BOUNDARY = K.BOUNDARY
    INSIDE = K.INSIDE


class HullKind(enum.Enum):
    EMPTY = "empty"
    POINT = "point"
    SEGMENT = "segment"
    FULL = "full"


class Point2(NamedTuple):
    x: float
    y: float

    @classmethod
    def of(cls, x, y) -> "Point2":
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"non-finite point ({x!r}, {y!r})")
        return cls(x, y)


def _is_float_pair(p) -> bool:
    return type(p[0]) is float and type(p[1]) is float


# The float kernel is exact while every nonzero coordinate lies in
# [2^-400, 2^400]: then no difference product or its rounding tail underflows.
_SAFE_EXP = 400
_MAX_SPAN = 2 * _SAFE_EXP - 10


def _kernel_shift(values) -> int | None:
    """Power of two that moves all coordinates into the kernel's exact range.

    Scaling every coordinate by 2^k is exact here and leaves every orientation
    unchanged. None means the dynamic range is too wide for any single k.
    """
    v = np.abs(np.asarray(values, dtype=float).ravel())
    v = v[v != 0.0]
    if v.size == 0:
        return 0
    e_hi = math.frexp(float(v.max()))[1]
    e_lo = math.frexp(float(v.min()))[1]
    if e_lo > -_SAFE_EXP and e_hi <= _SAFE_EXP:
        return 0
    if e_hi - e_lo > _MAX_SPAN:
        return None
    return -((e_hi + e_lo) // 2)


def _orient_rational(a, b, c) -> int:
    ax, ay, bx, by, cx, cy = (Fraction(v) for v in (*a, *b, *c))
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (det > 0) - (det < 0)


def orientation(a, b, c) -> Orientation:
    """Exact sign of (b - a) x (c - a).

    Doubles go through the adaptive kernel, rescaled by a power of two when
    they are tiny or huge. Any other real coordinates (ints, Fractions, numpy
    scalars) are evaluated in rational arithmetic, so large integer inputs that
    doubles cannot hold keep their exact sign.
    """
    if _is_float_pair(a) and _is_float_pair(b) and _is_float_pair(c):
        vals = (a[0], a[1], b[0], b[1], c[0], c[1])
        k = _kernel_shift(vals)
        if k is not None:
            return Orientation(K.orient(*(math.ldexp(v, k) for v in vals)))
    return Orientation(_orient_rational(a, b, c))


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Convex hull as a counterclockwise cycle of strictly convex vertices.

    ``vertices`` is a read-only (k, 2) array; k is 0, 1, 2 for the
    degenerate kinds.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float).reshape(-1, 2)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def kind(self) -> HullKind:
        k = len(self.vertices)
        if k >= 3:
            return HullKind.FULL
        return (HullKind.EMPTY, HullKind.POINT, HullKind.SEGMENT)[k]

    @property
    def xs(self) -> np.ndarray:
        return self.vertices[:, 0]

    @property
    def ys(self) -> np.ndarray:
        return self.vertices[:, 1]

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        if not isinstance(other, ConvexPolygon):
            return NotImplemented
        return np.array_equal(self.vertices, other.vertices)

    def __hash__(self):
        return hash(self.vertices.tobytes())

    def area(self) -> float:
        if len(self.vertices) < 3:
            return 0.0
        x, y = self.xs, self.ys
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def edges(self):
        """Iterate (a, b) vertex pairs of the CCW boundary."""
        v = self.vertices
        for i in range(len(v)):
            yield v[i], v[(i + 1) % len(v)]

    def __repr__(self):
        return f"ConvexPolygon({self.kind.value}, {len(self.vertices)} vertices)"


def as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return np.empty((0, 2))
    arr = arr.reshape(-1, 2)
    if not np.isfinite(arr).all():
        raise ValueError("points must be finite")
    return arr


def _hull_rational(arr: np.ndarray) -> np.ndarray:
    # monotone chain with rational orientation, for inputs the kernel cannot scale
    pts = sorted({(float(x), float(y)) for x, y in arr})
    if len(pts) < 3:
        return np.array(pts, dtype=float).reshape(-1, 2)

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _orient_rational(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower, upper = chain(pts), chain(pts[::-1])
    return np.array(lower[:-1] + upper[:-1], dtype=float)


def convex_hull(points) -> ConvexPolygon:
    """Strictly convex hull of a point set (duplicates and collinear points allowed)."""
    arr = as_points(points)
    k = _kernel_shift(arr)
    if k is None:
        return ConvexPolygon(_hull_rational(arr))
    scaled = np.ldexp(arr, k)
    hull = K.hull_vertices(np.ascontiguousarray(scaled[:, 0]), np.ascontiguousarray(scaled[:, 1]))
    return ConvexPolygon(np.ldexp(hull, -k))


def _locate_rational(v: np.ndarray, p) -> int:
    h = len(v)
    pts = [tuple(map(float, q)) for q in v]
    p = (float(p[0]), float(p[1]))

    def on_segment(a, b):
        return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))

    if h == 0:
        return K.OUTSIDE
    if h == 1:
        return K.BOUNDARY if p == pts[0] else K.OUTSIDE
    if h == 2:
        hit = _orient_rational(pts[0], pts[1], p) == 0 and on_segment(pts[0], pts[1])
        return K.BOUNDARY if hit else K.OUTSIDE
    signs = [_orient_rational(pts[i], pts[(i + 1) % h], p) for i in range(h)]
    if min(signs) < 0:
        return K.OUTSIDE
    return K.INSIDE if min(signs) > 0 else K.BOUNDARY


def locate(poly: ConvexPolygon, x) -> Location:
    """Closed-polygon location. Degenerate polygons have no INSIDE points."""
    return Location(int(locate_many(poly, [x])[0]))


def locate_many(poly: ConvexPolygon, points) -> np.ndarray:
    arr = as_points(points)
    k = _kernel_shift(np.concatenate((poly.vertices, arr)))
    if k is None:
        return np.array([_locate_rational(poly.vertices, p) for p in arr], dtype=np.int8)
    v = np.ldexp(poly.vertices, k)
    q = np.ldexp(arr, k)
    return K.locate_many(np.ascontiguousarray(v[:, 0]), np.ascontiguousarray(v[:, 1]),
                         np.ascontiguousarray(q[:, 0]), np.ascontiguousarray(q[:, 1]))


def edge_distances(poly: ConvexPolygon) -> np.ndarray:
    """Signed distances from the origin to each edge line (positive = origin on the inner side)."""
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    cross = v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0]
    return cross / np.hypot(w[:, 0] - v[:, 0], w[:, 1] - v[:, 1])


def origin_disk_in_polygon(poly: ConvexPolygon, r: float) -> bool:
    """True iff the closed disk of radius r about the origin lies in poly."""
    if r <= 0:
        raise ValueError("radius must be positive")
    if poly.kind is not HullKind.FULL:
        return False
    if locate(poly, (0.0, 0.0)) is not Location.INSIDE:
        return False
    return bool(edge_distances(poly).min() >= r)


@dataclass(frozen=True)
class Halfplane:
    """Closed halfplane {x : normal . x >= offset} with a unit normal."""

    normal: tuple[float, float]
    offset: float

    def __post_init__(self):
        nx, ny = (float(c) for c in self.normal)
        if abs(math.hypot(nx, ny) - 1.0) > 1e-12:
            raise ValueError("halfplane normal must have unit length")
        object.__setattr__(self, "normal", (nx, ny))
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_angle(cls, theta: float, offset: float) -> "Halfplane":
        return cls((math.cos(theta), math.sin(theta)), offset)

    def opposite(self) -> "Halfplane":
        """The complementary halfplane (sharing the boundary line)."""
        return Halfplane((-self.normal[0], -self.normal[1]), -self.offset)

    def contains(self, x) -> bool:
        return self.normal[0] * x[0] + self.normal[1] * x[1] >= self.offset


def _normalize_angle(a: float) -> float:
    a = math.fmod(a, TWO_PI)
    if a < 0:
        a += TWO_PI
    return 0.0 if a >= TWO_PI else a


@dataclass(frozen=True)
class ArcSet:
    """Disjoint half-open angular intervals [a, b) on a circle of given radius."""

    radius: float
    arcs: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "arcs", _merge_arcs(self.arcs))

    @classmethod
    def full(cls, radius: float) -> "ArcSet":
        return cls(radius, ((0.0, TWO_PI),))

    @classmethod
    def from_interval(cls, radius: float, start: float, length: float) -> "ArcSet":
        """Arc of given angular length starting at ``start``; wraps through 0 if needed."""
        if length >= TWO_PI:
            return cls.full(radius)
        if length <= 0:
            return cls(radius)
        a = _normalize_angle(start)
        b = a + length
        if b <= TWO_PI:
            return cls(radius, ((a, b),))
        return cls(radius, ((a, TWO_PI), (0.0, b - TWO_PI)))

    def measure(self) -> float:
        return math.fsum(b - a for a, b in self.arcs)

    def contains(self, theta: float) -> bool:
        t = _normalize_angle(theta)
        return any(a <= t < b for a, b in self.arcs)


def _merge_arcs(arcs: Iterable[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    cleaned = []
    for a, b in arcs:
        a, b = float(a), float(b)
        if not (0.0 <= a <= b <= TWO_PI):
            raise ValueError(f"arc ({a}, {b}) outside [0, 2pi]")
        if b > a:
            cleaned.append((a, b))
    cleaned.sort()
    merged: list[list[float]] = []
    for a, b in cleaned:
        if merged and a <= merged[-1][1] + ARC_MERGE_TOL:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    if merged and merged[-1][1] > TWO_PI - ARC_MERGE_TOL:
        merged[-1][1] = TWO_PI
    if merged and merged[0][0] < ARC_MERGE_TOL:
        merged[0][0] = 0.0
    return tuple((a, b) for a, b in merged)


def _check_radius(a: ArcSet, b: ArcSet):
    if a.radius != b.radius:
        raise ValueError(f"radius mismatch: {a.radius} != {b.radius}")


def arcset_union(a: ArcSet, b: ArcSet) -> ArcSet:
    _check_radius(a, b)
    return ArcSet(a.radius, a.arcs + b.arcs)


def arcset_complement(a: ArcSet) -> ArcSet:
    gaps = []
    prev = 0.0
    for lo, hi in a.arcs:
        if lo > prev:
            gaps.append((prev, lo))
        prev = hi
    if prev < TWO_PI:
        gaps.append((prev, TWO_PI))
    return ArcSet(a.radius, tuple(gaps))


def arcset_intersection(a: ArcSet, b: ArcSet) -> ArcSet:
    _check_radius(a, b)
    return arcset_complement(arcset_union(arcset_complement(a), arcset_complement(b)))


def arcset_measure(a: ArcSet) -> float:
    return a.measure()


def circle_inside_arcs(poly: ConvexPolygon, r: float) -> ArcSet:
    """Angles theta with r(cos theta, sin theta) in the closed polygon.

    Degenerate polygons meet the circle in at most two points, so they give
    the empty set.
    """
    if poly.kind is not HullKind.FULL:
        return ArcSet(r)
    starts, ends = K.excluded_arcs(poly.xs, poly.ys, float(r), ARC_MERGE_TOL)
    excluded = ArcSet(r, tuple(zip(starts.tolist(), ends.tolist())))
    return arcset_complement(excluded)


def circle_inside_measure(poly: ConvexPolygon, r: float) -> float:
    """Same as ``arcset_measure(circle_inside_arcs(poly, r))`` without building arcs."""
    if poly.kind is not HullKind.FULL:
        return 0.0
    return K.inside_measure(poly.xs, poly.ys, float(r), ARC_MERGE_TOL)


def segment_area(R: float, rho):
    """Area of the part of the disk of radius R beyond a chord at distance rho >= 0."""
    rho = np.asarray(rho, dtype=float)
    q = np.clip(rho / R, 0.0, 1.0)
    area = R * R * (np.arccos(q) - q * np.sqrt(1.0 - q * q))
    area = np.where(rho >= R, 0.0, area)
    return float(area) if area.ndim == 0 else area


def _tri_disk_area(ax, ay, bx, by, R):
    # signed area of triangle (0, a, b) intersected with the disk |x| <= R
    da = math.hypot(ax, ay)
    db = math.hypot(bx, by)
    cross = ax * by - ay * bx
    if cross == 0.0:
        return 0.0
    if da <= R and db <= R:
        return 0.5 * cross
    dx, dy = bx - ax, by - ay
    # points a + t d on the circle: |d|^2 t^2 + 2 (a.d) t + |a|^2 - R^2 = 0
    qa = dx * dx + dy * dy
    qb = ax * dx + ay * dy
    qc = da * da - R * R
    disc = qb * qb - qa * qc

    def sector(ux, uy, vx, vy):
        ang = math.atan2(ux * vy - uy * vx, ux * vx + uy * vy)
        return 0.5 * R * R * ang

    if disc <= 0.0:
        return sector(ax, ay, bx, by)
    sq = math.sqrt(disc)
    t1 = max(0.0, (-qb - sq) / qa)
    t2 = min(1.0, (-qb + sq) / qa)
    if t1 >= t2:
        return sector(ax, ay, bx, by)
    px, py = ax + t1 * dx, ay + t1 * dy
    qx, qy = ax + t2 * dx, ay + t2 * dy
    area = 0.0
    area += sector(ax, ay, px, py) if da > R else 0.5 * (ax * py - ay * px)
    area += 0.5 * (px * qy - py * qx)
    area += sector(qx, qy, bx, by) if db > R else 0.5 * (qx * by - qy * bx)
    return area


def polygon_disk_area(poly: ConvexPolygon, R: float) -> float:
    """Area of poly intersected with the disk of radius R about the origin."""
    if poly.kind is not HullKind.FULL:
        return 0.0
    v = poly.vertices
    if float((v * v).sum(axis=1).max()) <= R * R:
        return poly.area()
    return math.fsum(_tri_disk_area(a[0], a[1], b[0], b[1], R) for a, b in poly.edges())
