"""Minimal deterministic SVG line charts.

Output depends only on the input numbers: coordinates are printed with a
fixed number of decimals and no timestamps or ids are generated.
"""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

WIDTH, HEIGHT = 720, 480
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 80, 120, 40, 60
PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#17becf",
    "#8c564b",
    "#e377c2",
)


def _num(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t = first + len(ticks) * step
    return ticks


def _tick_label(v: float) -> str:
    return f"{v:.4g}"


def line_chart(
    x: Sequence[float],
    series: Sequence[Sequence[float]],
    labels: Sequence[str],
    marker_x: float | None = None,
    x_label: str = "x",
    y_label: str = "value",
    title: str = "",
) -> str:
    xs = [float(v) for v in x]
    ys = [[float(v) for v in s] for s in series]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    flat = [v for s in ys for v in s if math.isfinite(v)]
    y_lo, y_hi = (min(flat), max(flat)) if flat else (0.0, 1.0)
    pad = (y_hi - y_lo) * 0.05 if y_hi > y_lo else max(abs(y_lo) * 0.1, 0.5)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(v):
        return MARGIN_LEFT + (v - x_lo) / (x_hi - x_lo) * plot_w

    def py(v):
        return MARGIN_TOP + (y_hi - v) / (y_hi - y_lo) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(
            f'<text x="{WIDTH / 2:.2f}" y="24" text-anchor="middle" font-size="14">{escape(title)}</text>'
        )
    out.append(
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black"/>'
    )
    for t in nice_ticks(x_lo, x_hi):
        X = _num(px(t))
        bottom = MARGIN_TOP + plot_h
        out.append(f'<line x1="{X}" y1="{bottom}" x2="{X}" y2="{bottom + 5}" stroke="black"/>')
        out.append(
            f'<text x="{X}" y="{bottom + 18}" text-anchor="middle">{_tick_label(t)}</text>'
        )
    for t in nice_ticks(y_lo, y_hi):
        Y = _num(py(t))
        out.append(
            f'<line x1="{MARGIN_LEFT - 5}" y1="{Y}" x2="{MARGIN_LEFT}" y2="{Y}" stroke="black"/>'
        )
        out.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{Y}" text-anchor="end" dominant-baseline="middle">'
            f"{_tick_label(t)}</text>"
        )
    if y_lo < 0 < y_hi:
        Y = _num(py(0.0))
        out.append(
            f'<line x1="{MARGIN_LEFT}" y1="{Y}" x2="{MARGIN_LEFT + plot_w}" y2="{Y}" '
            'stroke="#bbbbbb" stroke-width="0.5"/>'
        )
    if marker_x is not None:
        X = _num(px(marker_x))
        out.append(
            f'<line class="marker" x1="{X}" y1="{MARGIN_TOP}" x2="{X}" y2="{MARGIN_TOP + plot_h}" '
            'stroke="#555555" stroke-dasharray="4 3"/>'
        )
    for j, (label, s) in enumerate(zip(labels, ys)):
        color = PALETTE[j % len(PALETTE)]
        pts = " ".join(f"{_num(px(a))},{_num(py(b))}" for a, b in zip(xs, s))
        out.append(
            f"<polyline data-label={quoteattr(str(label))} fill=\"none\" stroke=\"{color}\" "
            f'stroke-width="1.5" points="{pts}"/>'
        )
        ly = MARGIN_TOP + 10 + 18 * j
        lx = MARGIN_LEFT + plot_w + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly}" dominant-baseline="middle">{escape(str(label))}</text>')
    out.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2:.2f}" y="{HEIGHT - 16}" text-anchor="middle">'
        f"{escape(x_label)}</text>"
    )
    out.append(
        f'<text x="20" y="{MARGIN_TOP + plot_h / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 20 {MARGIN_TOP + plot_h / 2:.2f})">{escape(y_label)}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
