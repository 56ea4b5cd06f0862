"""A small SVG 1.1 line-plot writer: polylines, markers with error bars, and
linear or log10 axes with decade ticks. Enough for a two-curve figure."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


@dataclass
class Series:
    label: str
    xs: list
    ys: list
    errs: list | None = None
    markers: bool = False
    color: str | None = None


@dataclass
class Axes:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    logx: bool = False
    logy: bool = False
    series: list = field(default_factory=list)

    def line(self, label, xs, ys, color=None):
        self.series.append(Series(label, list(xs), list(ys), None, False, color))

    def points(self, label, xs, ys, errs=None, color=None):
        self.series.append(Series(label, list(xs), list(ys),
                                  None if errs is None else list(errs), True, color))

    def _range(self, log: bool, values):
        vals = [v for v in values if math.isfinite(v) and (v > 0 or not log)]
        if not vals:
            return (1.0, 10.0) if log else (0.0, 1.0)
        lo, hi = min(vals), max(vals)
        if log:
            lo, hi = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
            if lo == hi:
                hi += 1
            return float(lo), float(hi)
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.05 * (hi - lo)
        return lo - pad, hi + pad


def _ticks(lo: float, hi: float, log: bool):
    if log:
        return [(float(k), f"1e{k}") for k in range(int(lo), int(hi) + 1)]
    step = 10.0 ** math.floor(math.log10((hi - lo) / 5.0))
    for mult in (1, 2, 5, 10):
        if (hi - lo) / (step * mult) <= 6:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    out = []
    k = 0
    while start + k * step <= hi + 1e-12 * step:
        v = start + k * step
        out.append((v, f"{v:g}"))
        k += 1
    return out


def render(panels: list[Axes], width: int = 640, panel_height: int = 320) -> str:
    """SVG document with the panels stacked vertically."""
    margin_l, margin_r, margin_t, margin_b = 70, 20, 30, 45
    height = panel_height * len(panels)
    out = [f'<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
           f'height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" '
           f'font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>']
    for k, ax in enumerate(panels):
        top = k * panel_height + margin_t
        bottom = (k + 1) * panel_height - margin_b
        left, right = margin_l, width - margin_r
        xs = [x for s in ax.series for x in s.xs]
        ys = [y for s in ax.series for y in s.ys]
        for s in ax.series:
            if s.errs:
                ys += [y + e for y, e in zip(s.ys, s.errs)] + [y - e for y, e in zip(s.ys, s.errs)]
        x0, x1 = ax._range(ax.logx, xs)
        y0, y1 = ax._range(ax.logy, ys)

        def mx(x, x0=x0, x1=x1, ax=ax, left=left, right=right):
            v = math.log10(x) if ax.logx else x
            return left + (v - x0) / (x1 - x0) * (right - left)

        def my(y, y0=y0, y1=y1, ax=ax, top=top, bottom=bottom):
            if ax.logy:
                y = max(y, 10.0 ** (y0 - 1))
            v = math.log10(y) if ax.logy else y
            v = min(max(v, y0 - 0.05 * (y1 - y0)), y1 + 0.05 * (y1 - y0))
            return bottom - (v - y0) / (y1 - y0) * (bottom - top)

        out.append(f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
                   f'fill="none" stroke="black"/>')
        for v, lab in _ticks(x0, x1, ax.logx):
            px = left + (v - x0) / (x1 - x0) * (right - left)
            out.append(f'<line x1="{_fmt(px)}" y1="{bottom}" x2="{_fmt(px)}" y2="{bottom + 4}" stroke="black"/>')
            out.append(f'<text x="{_fmt(px)}" y="{bottom + 16}" text-anchor="middle">{escape(lab)}</text>')
        for v, lab in _ticks(y0, y1, ax.logy):
            py = bottom - (v - y0) / (y1 - y0) * (bottom - top)
            out.append(f'<line x1="{left - 4}" y1="{_fmt(py)}" x2="{left}" y2="{_fmt(py)}" stroke="black"/>')
            out.append(f'<text x="{left - 6}" y="{_fmt(py + 4)}" text-anchor="end">{escape(lab)}</text>')
        out.append(f'<text x="{(left + right) / 2}" y="{top - 10}" text-anchor="middle" '
                   f'font-size="13">{escape(ax.title)}</text>')
        out.append(f'<text x="{(left + right) / 2}" y="{bottom + 34}" text-anchor="middle">'
                   f'{escape(ax.xlabel)}</text>')
        cy = (top + bottom) / 2
        out.append(f'<text x="16" y="{cy}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {cy})">{escape(ax.ylabel)}</text>')
        for j, s in enumerate(ax.series):
            color = s.color or PALETTE[j % len(PALETTE)]
            pts = [(x, y) for x, y in zip(s.xs, s.ys)
                   if math.isfinite(y) and (x > 0 or not ax.logx)]
            if s.markers:
                errs = s.errs or [0.0] * len(s.xs)
                for (x, y), e in zip(pts, errs):
                    px, py = mx(x), my(y)
                    if e > 0:
                        out.append(f'<line x1="{_fmt(px)}" y1="{_fmt(my(y - e))}" x2="{_fmt(px)}" '
                                   f'y2="{_fmt(my(y + e))}" stroke="{color}"/>')
                    out.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="2.5" fill="{color}"/>')
            else:
                coords = " ".join(f"{_fmt(mx(x))},{_fmt(my(y))}" for x, y in pts)
                out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            ly = top + 14 + 14 * j
            out.append(f'<line x1="{right - 150}" y1="{ly - 4}" x2="{right - 130}" y2="{ly - 4}" '
                       f'stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{right - 125}" y="{ly}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
