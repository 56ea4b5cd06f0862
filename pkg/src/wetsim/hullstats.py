"""Exact mu(P_n), mu(int P_n), f0 and f0_bar for a sample.

Hull masses come from the hull geometry, never from inner Monte Carlo, so the
only randomness in an estimate of E[1 - mu(P_n)] is the sample itself.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .geom2d import (ARC_MERGE_TOL, ConvexPolygon, HullKind, Location, as_points,
                     convex_hull, locate, polygon_disk_area)
from .measures import ConcentricCircles, Measure, PolygonBoundaryMeasure, UniformDisk


@dataclass(frozen=True)
class HullStats:
    f0: int
    f0_bar: int
    hull_mass: float
    interior_mass: float


@functools.singledispatch
def hull_mass(m: Measure, poly: ConvexPolygon) -> float:
    """mu of the closed polygon."""
    raise NotImplementedError(f"hull_mass not available for {type(m).__name__}")


@hull_mass.register
def _(m: ConcentricCircles, poly: ConvexPolygon) -> float:
    if poly.kind is not HullKind.FULL:
        return 0.0
    mass = K.circles_mass(poly.xs, poly.ys, m.radii, m.weights, ARC_MERGE_TOL)
    return min(max(mass, 0.0), 1.0)


@hull_mass.register
def _(m: UniformDisk, poly: ConvexPolygon) -> float:
    return polygon_disk_area(poly, m.R) / (math.pi * m.R ** 2)


def _orient(u, v, p) -> int:
    return K.orient(u[0], u[1], v[0], v[1], p[0], p[1])


def _clip_length(a, b, poly: ConvexPolygon, open_interior: bool) -> float:
    """Length of segment ab inside the (closed or open) full-dimensional polygon."""
    t0, t1 = 0.0, 1.0
    for u, v in poly.edges():
        sa, sb = _orient(u, v, a), _orient(u, v, b)
        if sa == 0 and sb == 0:
            if open_interior:
                return 0.0
            continue
        if sa >= 0 and sb >= 0:
            continue
        if sa <= 0 and sb <= 0:
            return 0.0
        ex, ey = v[0] - u[0], v[1] - u[1]
        fa = ex * (a[1] - u[1]) - ey * (a[0] - u[0])
        fb = ex * (b[1] - u[1]) - ey * (b[0] - u[0])
        cut = fa / (fa - fb)
        if sa < 0:
            t0 = max(t0, cut)
        else:
            t1 = min(t1, cut)
        if t1 <= t0:
            return 0.0
    return (t1 - t0) * math.hypot(b[0] - a[0], b[1] - a[1])


def _segment_overlap(a, b, p, q) -> float:
    """Length of segment ab shared with segment pq, when all four are collinear."""
    if _orient(a, b, p) != 0 or _orient(a, b, q) != 0:
        return 0.0
    dx, dy = b[0] - a[0], b[1] - a[1]
    ll = dx * dx + dy * dy
    tp = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / ll
    tq = ((q[0] - a[0]) * dx + (q[1] - a[1]) * dy) / ll
    lo, hi = max(0.0, min(tp, tq)), min(1.0, max(tp, tq))
    return max(0.0, hi - lo) * math.sqrt(ll)


def _support_edges(m: PolygonBoundaryMeasure):
    return list(m.polygon.edges())


@hull_mass.register
def _(m: PolygonBoundaryMeasure, poly: ConvexPolygon) -> float:
    if poly.kind is HullKind.FULL:
        total = math.fsum(_clip_length(a, b, poly, False) for a, b in _support_edges(m))
    elif poly.kind is HullKind.SEGMENT:
        p, q = poly.vertices
        total = math.fsum(_segment_overlap(a, b, p, q) for a, b in _support_edges(m))
    else:
        return 0.0
    return min(total / m.perimeter, 1.0)


@functools.singledispatch
def interior_mass(m: Measure, poly: ConvexPolygon) -> float:
    """mu of the open interior of the polygon (empty for degenerate polygons)."""
    raise NotImplementedError(f"interior_mass not available for {type(m).__name__}")


@interior_mass.register(ConcentricCircles)
@interior_mass.register(UniformDisk)
def _(m, poly: ConvexPolygon) -> float:
    # a polygon boundary meets a circle in finitely many points and has zero area
    if poly.kind is not HullKind.FULL:
        return 0.0
    return hull_mass(m, poly)


@interior_mass.register
def _(m: PolygonBoundaryMeasure, poly: ConvexPolygon) -> float:
    if poly.kind is not HullKind.FULL:
        return 0.0
    support = m.polygon
    # int(poly) within int(support), which misses the support boundary entirely
    if all(locate(support, v) is not Location.OUTSIDE for v in poly.vertices):
        return 0.0
    total = math.fsum(_clip_length(a, b, poly, True) for a, b in _support_edges(m))
    return min(total / m.perimeter, 1.0)


def f0(points) -> int:
    """Number of vertices (distinct extreme points) of the hull."""
    return len(convex_hull(points))


def _f0_bar(hull: ConvexPolygon, arr: np.ndarray) -> int:
    if hull.kind is not HullKind.FULL:
        return len(arr)
    # every point lies in its own hull, so "not inside" means "on the boundary"
    return int(K.count_not_inside(hull.xs, hull.ys,
                                  np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])))


def f0_bar(points) -> int:
    """Number of sample points on the hull boundary, duplicates counted."""
    arr = as_points(points)
    return _f0_bar(convex_hull(arr), arr)


def hull_stats(m: Measure, points) -> HullStats:
    arr = as_points(points)
    hull = convex_hull(arr)
    return HullStats(f0=len(hull), f0_bar=_f0_bar(hull, arr),
                     hull_mass=hull_mass(m, hull), interior_mass=interior_mass(m, hull))
