"""Minimal self-contained SVG line plots.

One format, no rendering dependency: everything the pipeline plots is a set
of (x, y) series with optional log axes and reference lines, written with
fixed float formatting so identical data produces identical bytes.
"""

from __future__ import annotations

import math

__all__ = ["line_plot"]

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
           "#17becf", "#7f7f7f"]

_W, _H = 760, 500
_ML, _MR, _MT, _MB = 72, 20, 40, 56


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _ticks(lo: float, hi: float, log: bool):
    if log:
        lo_e = math.floor(math.log10(lo))
        hi_e = math.ceil(math.log10(hi))
        return [10.0**e for e in range(lo_e, hi_e + 1) if lo <= 10.0**e <= hi * 1.0001]
    span = hi - lo
    if span <= 0:
        return [lo]
    step = 10.0 ** math.floor(math.log10(span / 4))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= 6:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * span:
        ticks.append(t)
        t += step
    return ticks


def line_plot(path, series, *, title="", xlabel="", ylabel="",
              logx=False, logy=False, hlines=()):
    """Write a line plot; series is a list of dicts with keys label, x, y."""
    xs = [float(v) for s in series for v in s["x"]]
    ys = [float(v) for s in series for v in s["y"]] + [float(h) for h in hlines]
    if logx:
        xs = [v for v in xs if v > 0]
    if logy:
        ys = [v for v in ys if v > 0]
    if not xs or not ys:
        raise ValueError("nothing to plot")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    if not logy:
        pad = 0.06 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad

    def tx(v):
        t = (math.log10(v) - math.log10(x_lo)) / (math.log10(x_hi) - math.log10(x_lo)) \
            if logx else (v - x_lo) / (x_hi - x_lo)
        return _ML + t * (_W - _ML - _MR)

    def ty(v):
        t = (math.log10(v) - math.log10(y_lo)) / (math.log10(y_hi) - math.log10(y_lo)) \
            if logy else (v - y_lo) / (y_hi - y_lo)
        return _H - _MB - t * (_H - _MT - _MB)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="15">{title}</text>',
    ]
    # axes and ticks
    out.append(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
               f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>')
    for t in _ticks(x_lo, x_hi, logx):
        px = tx(t)
        out.append(f'<line x1="{_fmt(px)}" y1="{_H - _MB}" x2="{_fmt(px)}" '
                   f'y2="{_H - _MB + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px)}" y="{_H - _MB + 20}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>')
    for t in _ticks(y_lo, y_hi, logy):
        py = ty(t)
        out.append(f'<line x1="{_ML - 5}" y1="{_fmt(py)}" x2="{_ML}" '
                   f'y2="{_fmt(py)}" stroke="black"/>')
        out.append(f'<text x="{_ML - 8}" y="{_fmt(py + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>')
    out.append(f'<text x="{_W // 2}" y="{_H - 14}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="13">{xlabel}</text>')
    out.append(f'<text x="18" y="{_H // 2}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="13" transform="rotate(-90 18 {_H // 2})">{ylabel}</text>')
    for h in hlines:
        if logy and h <= 0:
            continue
        py = ty(h)
        out.append(f'<line x1="{_ML}" y1="{_fmt(py)}" x2="{_W - _MR}" y2="{_fmt(py)}" '
                   f'stroke="#555555" stroke-dasharray="6,4"/>')
    for k, s in enumerate(series):
        color = s.get("color", _COLORS[k % len(_COLORS)])
        pts = [(tx(float(x)), ty(float(y))) for x, y in zip(s["x"], s["y"])
               if (not logx or x > 0) and (not logy or y > 0)]
        if len(pts) > 1:
            path_d = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in pts)
            out.append(f'<polyline points="{path_d}" fill="none" stroke="{color}" '
                       f'stroke-width="1.6"/>')
        for px, py in pts:
            out.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="2.6" fill="{color}"/>')
        label = s.get("label", "")
        if label:
            ly = _MT + 18 + 16 * k
            out.append(f'<line x1="{_W - _MR - 150}" y1="{ly - 4}" x2="{_W - _MR - 126}" '
                       f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{_W - _MR - 120}" y="{ly}" font-family="sans-serif" '
                       f'font-size="11">{label}</text>')
    out.append("</svg>")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(out) + "\n")
