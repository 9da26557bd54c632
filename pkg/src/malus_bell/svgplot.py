"""Self-contained SVG line plot of correlation curves.

Fixed geometry so output is deterministic and diff-able: an 800x500
viewBox, y range [-1.05, 1.05], reference lines at -1, 0 and +1, and one
polyline per curve.
"""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 500
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 30, 60
Y_MIN, Y_MAX = -1.05, 1.05
COLORS = ["#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad"]


def _xmap(x0: float, x1: float):
    span = (x1 - x0) or 1.0
    w = WIDTH - LEFT - RIGHT
    return lambda x: LEFT + (x - x0) / span * w


def _ymap(y: float) -> float:
    h = HEIGHT - TOP - BOTTOM
    return TOP + (Y_MAX - y) / (Y_MAX - Y_MIN) * h


def render_svg(curves: Sequence[tuple[str, np.ndarray, np.ndarray]],
               title: str = "", xlabel: str = "beta (rad)", ylabel: str = "correlation") -> str:
    """Render ``(label, beta, corr)`` curves on a shared axis."""
    if not curves:
        raise ValueError("nothing to plot")
    xs = np.concatenate([np.asarray(c[1], dtype=float) for c in curves])
    x0, x1 = float(xs.min()), float(xs.max())
    if x0 == x1:
        x0, x1 = x0 - 0.5, x1 + 0.5
    xmap = _xmap(x0, x1)
    xl, xr = xmap(x0), xmap(x1)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="13">',
        f'<rect x="{LEFT}" y="{TOP}" width="{WIDTH - LEFT - RIGHT}" '
        f'height="{HEIGHT - TOP - BOTTOM}" fill="white" stroke="#444"/>',
    ]
    for level in (-1.0, 0.0, 1.0):
        y = _ymap(level)
        out.append(f'<line class="ref" x1="{xl:.3f}" y1="{y:.3f}" x2="{xr:.3f}" y2="{y:.3f}" '
                   f'stroke="#888" stroke-width="1"/>')
        out.append(f'<text x="{LEFT - 8}" y="{y + 4:.3f}" text-anchor="end">{level:+g}</text>')
    for k in range(5):
        xv = x0 + (x1 - x0) * k / 4
        out.append(f'<text x="{xmap(xv):.3f}" y="{HEIGHT - BOTTOM + 18}" '
                   f'text-anchor="middle">{xv:.3g}</text>')

    for idx, (label, beta, corr) in enumerate(curves):
        color = COLORS[idx % len(COLORS)]
        pts = " ".join(f"{xmap(b):.3f},{_ymap(c):.3f}"
                       for b, c in zip(np.asarray(beta, float), np.asarray(corr, float))
                       if math.isfinite(c))
        out.append(f'<polyline class="curve" data-label="{escape(label, {chr(34): "&quot;"})}" '
                   f'fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{WIDTH - RIGHT - 10}" y="{TOP + 18 + 16 * idx}" text-anchor="end" '
                   f'fill="{color}">{escape(label)}</text>')

    out.append(f'<text x="{(LEFT + WIDTH - RIGHT) / 2}" y="{HEIGHT - 15}" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{(TOP + HEIGHT - BOTTOM) / 2}" text-anchor="middle" '
               f'transform="rotate(-90 18 {(TOP + HEIGHT - BOTTOM) / 2})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{(LEFT + WIDTH - RIGHT) / 2}" y="20" text-anchor="middle">'
                   f'{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
