"""Minimal SVG line plot, enough for sweep previews."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def line_plot(x, series: dict, xlabel: str = "", ylabel: str = "", logx: bool = False,
              width: int = 640, height: int = 400) -> str:
    left, right, top, bottom = 60, 20, 20, 50
    pw, ph = width - left - right, height - top - bottom
    xs = [math.log10(v) if logx else float(v) for v in x]
    finite = [v for ys in series.values() for v in ys if math.isfinite(v)]
    y0, y1 = (min(finite), max(finite)) if finite else (0.0, 1.0)
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x1 = x0 + 1.0

    def px(v):
        return left + pw * (v - x0) / (x1 - x0)

    def py(v):
        return top + ph * (1 - (v - y0) / (y1 - y0))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for t in range(5):
        xv = x0 + (x1 - x0) * t / 4
        yv = y0 + (y1 - y0) * t / 4
        xl = 10**xv if logx else xv
        out.append(f'<text x="{px(xv):.2f}" y="{top + ph + 16}" font-size="11" '
                   f'text-anchor="middle">{xl:.3g}</text>')
        out.append(f'<text x="{left - 6}" y="{py(yv) + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{yv:.3g}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 10}" font-size="13" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{top + ph / 2:.2f}" font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 14 {top + ph / 2:.2f})">{escape(ylabel)}</text>')
    for n, (name, ys) in enumerate(series.items()):
        color = _COLORS[n % len(_COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, ys) if math.isfinite(b))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{left + pw - 4}" y="{top + 14 + 14 * n}" font-size="12" '
                   f'text-anchor="end" fill="{color}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
