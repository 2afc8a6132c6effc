"""Minimal deterministic SVG line plots.

Byte-identical output for identical input is a hard requirement for the
emitted artifacts, so this module builds the document by plain string
formatting: no timestamps, no library version strings, no dict-order
dependence, fixed numeric formatting throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_WIDTH = 800
_HEIGHT = 560
_MARGIN_L = 72
_MARGIN_R = 24
_MARGIN_T = 40
_MARGIN_B = 56


@dataclass(frozen=True)
class Series:
    name: str
    x: Sequence[float]
    y: Sequence[float]


def _nice_step(span: float) -> float:
    if span <= 0.0 or not math.isfinite(span):
        return 1.0
    raw = span / 5.0
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0):
        if raw <= mult * mag:
            return mult * mag
    return 10.0 * mag


def _ticks(lo: float, hi: float) -> list[float]:
    step = _nice_step(hi - lo)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        # snap -0.0 to 0.0 so labels are stable
        ticks.append(0.0 if t == 0.0 else t)
        t += step
    return ticks


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def _px(value: float) -> str:
    return f"{value:.3f}"


def render_svg(
    series: Sequence[Series],
    x_label: str,
    y_label: str,
    title: str = "",
) -> str:
    """Standalone SVG document with one polyline per series.

    Axes are linear with auto ticks; the legend lists series in input
    order.  Raises ValueError for an empty series set or an empty series.
    """
    if not series:
        raise ValueError("render_svg requires at least one series")
    for s in series:
        if len(s.x) == 0 or len(s.x) != len(s.y):
            raise ValueError(f"series {s.name!r} must have matching non-empty x/y")

    x_min = min(min(s.x) for s in series)
    x_max = max(max(s.x) for s in series)
    y_min = min(min(s.y) for s in series)
    y_max = max(max(s.y) for s in series)
    if x_max == x_min:
        x_min, x_max = x_min - 1.0, x_max + 1.0
    if y_max == y_min:
        y_min, y_max = y_min - 1.0, y_max + 1.0
    # 4% padding so curves do not sit on the frame
    x_pad = 0.04 * (x_max - x_min)
    y_pad = 0.04 * (y_max - y_min)
    x_lo, x_hi = x_min - x_pad, x_max + x_pad
    y_lo, y_hi = y_min - y_pad, y_max + y_pad

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def sx(x: float) -> float:
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    out: list[str] = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">'
    )
    out.append(f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>')
    if title:
        out.append(
            f'<text x="{_WIDTH // 2}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{title}</text>'
        )

    # gridlines and tick labels
    for tx in _ticks(x_lo, x_hi):
        px = sx(tx)
        out.append(
            f'<line x1="{_px(px)}" y1="{_MARGIN_T}" x2="{_px(px)}" '
            f'y2="{_HEIGHT - _MARGIN_B}" stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_px(px)}" y="{_HEIGHT - _MARGIN_B + 18}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="12">'
            f"{_fmt(tx)}</text>"
        )
    for ty in _ticks(y_lo, y_hi):
        py = sy(ty)
        out.append(
            f'<line x1="{_MARGIN_L}" y1="{_px(py)}" x2="{_WIDTH - _MARGIN_R}" '
            f'y2="{_px(py)}" stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_MARGIN_L - 8}" y="{_px(py + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{_fmt(ty)}</text>'
        )

    # frame
    out.append(
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#000000" stroke-width="1"/>'
    )

    # data
    for i, s in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(
            f"{_px(sx(float(x)))},{_px(sy(float(y)))}" for x, y in zip(s.x, s.y)
        )
        out.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )

    # legend
    legend_x = _WIDTH - _MARGIN_R - 170
    legend_y = _MARGIN_T + 10
    for i, s in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        row_y = legend_y + 18 * i
        out.append(
            f'<line x1="{legend_x}" y1="{row_y}" x2="{legend_x + 24}" '
            f'y2="{row_y}" stroke="{color}" stroke-width="1.5"/>'
        )
        out.append(
            f'<text x="{legend_x + 30}" y="{row_y + 4}" '
            f'font-family="sans-serif" font-size="12">{s.name}</text>'
        )

    # axis labels
    out.append(
        f'<text x="{_MARGIN_L + plot_w // 2}" y="{_HEIGHT - 12}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="14">'
        f"{x_label}</text>"
    )
    out.append(
        f'<text x="18" y="{_MARGIN_T + plot_h // 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14" '
        f'transform="rotate(-90 18 {_MARGIN_T + plot_h // 2})">{y_label}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
