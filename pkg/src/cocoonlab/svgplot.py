"""Deterministic standalone SVG scatter plots, no plotting library required.

Axes are linear with 1-2-5 tick labels; coordinates are formatted with %.6g so
the same input always yields the same bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NumericalError


@dataclass(frozen=True)
class ScatterStyle:
    width: int = 720
    height: int = 540
    margin: int = 56
    radius: float = 1.2
    color: str = "#1f4e79"
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list:
    """Round tick positions covering [lo, hi] with a 1-2-5 step."""
    if hi <= lo:
        pad = max(abs(lo), 1.0) * 0.5
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def emit_scatter_svg(points, style: ScatterStyle = ScatterStyle()) -> bytes:
    """Standalone SVG scatter of finite (x, y) points; empty input is an error."""
    pts = [(float(x), float(y)) for x, y in points]
    if not pts:
        raise NumericalError("cannot plot an empty point set")
    for x, y in pts:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise NumericalError(f"non-finite plot coordinate ({x}, {y})")

    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    x_pad = 0.03 * (x_hi - x_lo)
    y_pad = 0.03 * (y_hi - y_lo)
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    m = style.margin
    plot_w = style.width - 2 * m
    plot_h = style.height - 2 * m

    def sx(x):
        return m + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return style.height - m - (y - y_lo) / (y_hi - y_lo) * plot_h

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" '
        f'height="{style.height}" viewBox="0 0 {style.width} {style.height}">'
    )
    out.append(f'<rect width="{style.width}" height="{style.height}" fill="white"/>')
    if style.title:
        out.append(
            f'<text x="{style.width // 2}" y="{m // 2}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{style.title}</text>'
        )
    # frame
    out.append(
        f'<rect x="{m}" y="{m}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="black" stroke-width="1"/>'
    )
    for t in _nice_ticks(x_lo, x_hi):
        px = sx(t)
        out.append(
            f'<line x1="{_fmt(px)}" y1="{style.height - m}" x2="{_fmt(px)}" '
            f'y2="{style.height - m + 5}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_fmt(px)}" y="{style.height - m + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        py = sy(t)
        out.append(
            f'<line x1="{m - 5}" y1="{_fmt(py)}" x2="{m}" y2="{_fmt(py)}" stroke="black"/>'
        )
        out.append(
            f'<text x="{m - 8}" y="{_fmt(py)}" text-anchor="end" dominant-baseline="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    if style.xlabel:
        out.append(
            f'<text x="{style.width // 2}" y="{style.height - m // 4}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="12">'
            f'{style.xlabel}</text>'
        )
    if style.ylabel:
        out.append(
            f'<text x="{m // 3}" y="{style.height // 2}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 {m // 3} {style.height // 2})">{style.ylabel}</text>'
        )
    out.append(f'<g fill="{style.color}">')
    r = _fmt(style.radius)
    for x, y in pts:
        out.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="{r}"/>')
    out.append("</g>")
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
