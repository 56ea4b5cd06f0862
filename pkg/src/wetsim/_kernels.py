"""Compiled inner loops: exact orientation, monotone chain, point location,
circle/polygon arc clipping.

Everything here works on flat float64 arrays so it can be called from numba
and from plain Python alike. The public wrappers live in :mod:`wetsim.geom2d`.
"""
import math

import numpy as np
from numba import njit

_EPS = 2.0 ** -53
# Shewchuk's ccwerrboundA
_CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
_SPLITTER = 134217729.0  # 2**27 + 1

TWO_PI = 2.0 * math.pi

OUTSIDE = 0
BOUNDARY = 1
INSIDE = 2


@njit(cache=True, inline="always")
def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


@njit(cache=True, inline="always")
def _two_product(a, b):
    p = a * b
    ahi, alo = _split(a)
    bhi, blo = _split(b)
    err = alo * blo - (((p - ahi * bhi) - alo * bhi) - ahi * blo)
    return p, err


@njit(cache=True)
def _orient_exact(ax, ay, bx, by, cx, cy):
    # det = ax*by - ax*cy - cx*by - ay*bx + ay*cx + cy*bx, each product split
    # into an exact (hi, lo) pair and the twelve terms summed without error.
    terms = np.empty(12)
    terms[0], terms[1] = _two_product(ax, by)
    terms[2], terms[3] = _two_product(-ax, cy)
    terms[4], terms[5] = _two_product(-cx, by)
    terms[6], terms[7] = _two_product(-ay, bx)
    terms[8], terms[9] = _two_product(ay, cx)
    terms[10], terms[11] = _two_product(cy, bx)
    partials = np.zeros(12)
    m = 0
    for k in range(12):
        x = terms[k]
        i = 0
        for j in range(m):
            y = partials[j]
            if abs(x) < abs(y):
                x, y = y, x
            hi = x + y
            lo = y - (hi - x)
            if lo != 0.0:
                partials[i] = lo
                i += 1
            x = hi
        partials[i] = x
        m = i + 1
    # partials are non-overlapping: the topmost nonzero one carries the sign
    for k in range(m - 1, -1, -1):
        if partials[k] > 0.0:
            return 1
        if partials[k] < 0.0:
            return -1
    return 0


@njit(cache=True)
def orient(ax, ay, bx, by, cx, cy):
    """Sign of (b - a) x (c - a): +1 counterclockwise, -1 clockwise, 0 collinear."""
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    bound = _CCW_ERRBOUND * (abs(detleft) + abs(detright))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    if detleft == 0.0 and detright == 0.0:
        return 0
    return _orient_exact(ax, ay, bx, by, cx, cy)


@njit(cache=True)
def _lex_sort_unique(xs, ys):
    order = np.argsort(xs, kind="mergesort")
    sx = xs[order]
    sy = ys[order]
    n = len(sx)
    # runs of equal x are ordered by y with insertion sort (ties are rare)
    i = 0
    while i < n:
        j = i + 1
        while j < n and sx[j] == sx[i]:
            j += 1
        if j - i > 1:
            for a in range(i + 1, j):
                yv = sy[a]
                ov = order[a]
                b = a - 1
                while b >= i and sy[b] > yv:
                    sy[b + 1] = sy[b]
                    order[b + 1] = order[b]
                    b -= 1
                sy[b + 1] = yv
                order[b + 1] = ov
        i = j
    keep = np.empty(n, np.int64)
    k = 0
    for i in range(n):
        if k == 0 or sx[i] != sx[keep[k - 1]] or sy[i] != sy[keep[k - 1]]:
            keep[k] = i
            k += 1
    keep = keep[:k]
    return sx[keep], sy[keep]


@njit(cache=True)
def hull_vertices(xs, ys):
    """Andrew's monotone chain; returns the strictly convex CCW vertex cycle.

    Starts at the lexicographically smallest point. Returns 0, 1 or 2 rows for
    empty, single-point and collinear input.
    """
    ux, uy = _lex_sort_unique(xs, ys)
    n = len(ux)
    if n < 3:
        out = np.empty((n, 2))
        out[:, 0] = ux
        out[:, 1] = uy
        return out
    idx = np.empty(2 * n, np.int64)
    k = 0
    for i in range(n):
        while k >= 2 and orient(ux[idx[k - 2]], uy[idx[k - 2]],
                                ux[idx[k - 1]], uy[idx[k - 1]],
                                ux[i], uy[i]) <= 0:
            k -= 1
        idx[k] = i
        k += 1
    t = k + 1
    for i in range(n - 2, -1, -1):
        while k >= t and orient(ux[idx[k - 2]], uy[idx[k - 2]],
                                ux[idx[k - 1]], uy[idx[k - 1]],
                                ux[i], uy[i]) <= 0:
            k -= 1
        idx[k] = i
        k += 1
    h = k - 1
    out = np.empty((h, 2))
    for j in range(h):
        out[j, 0] = ux[idx[j]]
        out[j, 1] = uy[idx[j]]
    return out


@njit(cache=True)
def _on_segment(ax, ay, bx, by, px, py):
    # p is known to be collinear with a, b
    return (min(ax, bx) <= px <= max(ax, bx)) and (min(ay, by) <= py <= max(ay, by))


@njit(cache=True)
def locate_one(vx, vy, px, py):
    h = len(vx)
    if h == 0:
        return OUTSIDE
    if h == 1:
        return BOUNDARY if (px == vx[0] and py == vy[0]) else OUTSIDE
    if h == 2:
        if orient(vx[0], vy[0], vx[1], vy[1], px, py) != 0:
            return OUTSIDE
        return BOUNDARY if _on_segment(vx[0], vy[0], vx[1], vy[1], px, py) else OUTSIDE
    o1 = orient(vx[0], vy[0], vx[1], vy[1], px, py)
    o2 = orient(vx[0], vy[0], vx[h - 1], vy[h - 1], px, py)
    if o1 < 0 or o2 > 0:
        return OUTSIDE
    if o1 == 0:
        return BOUNDARY if _on_segment(vx[0], vy[0], vx[1], vy[1], px, py) else OUTSIDE
    if o2 == 0:
        return BOUNDARY if _on_segment(vx[0], vy[0], vx[h - 1], vy[h - 1], px, py) else OUTSIDE
    lo = 1
    hi = h - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if orient(vx[0], vy[0], vx[mid], vy[mid], px, py) >= 0:
            lo = mid
        else:
            hi = mid
    o = orient(vx[lo], vy[lo], vx[hi], vy[hi], px, py)
    if o > 0:
        return INSIDE
    if o == 0:
        return BOUNDARY
    return OUTSIDE


@njit(cache=True)
def locate_many(vx, vy, px, py):
    out = np.empty(len(px), np.int8)
    for i in range(len(px)):
        out[i] = locate_one(vx, vy, px[i], py[i])
    return out


@njit(cache=True)
def count_not_inside(vx, vy, px, py):
    """Number of points of (px, py) that are not strict interior points."""
    c = 0
    for i in range(len(px)):
        if locate_one(vx, vy, px[i], py[i]) != INSIDE:
            c += 1
    return c


@njit(cache=True)
def excluded_arcs(vx, vy, r, merge_tol):
    """Merged arcs of the circle |x| = r lying strictly outside the polygon.

    Each edge's outer open halfplane cuts an arc of half-width
    arccos(c / r) around its outward normal, c being the signed distance of
    the origin to the edge line. Returns (starts, ends) sorted, within
    [0, 2pi]; a single (0, 2pi) arc when the whole circle is outside.
    """
    h = len(vx)
    starts = np.empty(2 * h)
    ends = np.empty(2 * h)
    k = 0
    for i in range(h):
        j = i + 1 if i + 1 < h else 0
        ex = vx[j] - vx[i]
        ey = vy[j] - vy[i]
        length = math.hypot(ex, ey)
        # outward normal of a CCW edge
        nx = ey / length
        ny = -ex / length
        c = (vx[i] * vy[j] - vy[i] * vx[j]) / length
        # r^2 - c^2 via |a|^2 |d|^2 = (a.d)^2 + (a x d)^2; arccos(c / r) loses
        # everything when the chord is short and c is within rounding of r
        along = (vx[i] * ex + vy[i] * ey) / length
        ra = math.hypot(vx[i], vy[i])
        half_sq = (r - ra) * (r + ra) + along * along
        if half_sq <= 0.0:
            if c > 0.0:
                continue
            starts[0] = 0.0
            ends[0] = TWO_PI
            return starts[:1], ends[:1]
        alpha = math.atan2(math.sqrt(half_sq), c)
        phi = math.atan2(ny, nx)
        a = phi - alpha
        a = a - TWO_PI * math.floor(a / TWO_PI)
        if a >= TWO_PI:
            a = 0.0
        b = a + 2.0 * alpha
        if b > TWO_PI:
            starts[k] = a
            ends[k] = TWO_PI
            k += 1
            starts[k] = 0.0
            ends[k] = b - TWO_PI
            k += 1
        else:
            starts[k] = a
            ends[k] = b
            k += 1
    if k == 0:
        return starts[:0], ends[:0]
    order = np.argsort(starts[:k])
    ms = np.empty(k)
    me = np.empty(k)
    m = 0
    for idx in order:
        s = starts[idx]
        e = ends[idx]
        if m > 0 and s <= me[m - 1] + merge_tol:
            if e > me[m - 1]:
                me[m - 1] = e
        else:
            ms[m] = s
            me[m] = e
            m += 1
    return ms[:m], me[:m]


@njit(cache=True)
def inside_measure(vx, vy, r, merge_tol):
    """Angular measure of {theta : r(cos theta, sin theta) in closed polygon}."""
    if len(vx) < 3:
        return 0.0
    s, e = excluded_arcs(vx, vy, r, merge_tol)
    total = 0.0
    for i in range(len(s)):
        total += e[i] - s[i]
    out = TWO_PI - total
    if out < 0.0:
        return 0.0
    return out


@njit(cache=True)
def circles_mass(vx, vy, radii, weights, merge_tol):
    acc = 0.0
    for j in range(len(radii)):
        if weights[j] > 0.0:
            acc += weights[j] * inside_measure(vx, vy, radii[j], merge_tol) / TWO_PI
    return acc


@njit(cache=True)
def inradius_about(vx, vy, cx, cy):
    """Smallest signed distance from (cx, cy) to the edge lines of a CCW polygon."""
    h = len(vx)
    best = np.inf
    for i in range(h):
        j = i + 1 if i + 1 < h else 0
        ex = vx[j] - vx[i]
        ey = vy[j] - vy[i]
        d = (ex * (cy - vy[i]) - ey * (cx - vx[i])) / math.hypot(ex, ey)
        if d < best:
            best = d
    return best


@njit(cache=True)
def outside_disk_mask(px, py, cx, cy, rsq):
    out = np.empty(len(px), np.bool_)
    for i in range(len(px)):
        dx = px[i] - cx
        dy = py[i] - cy
        out[i] = dx * dx + dy * dy >= rsq
    return out
