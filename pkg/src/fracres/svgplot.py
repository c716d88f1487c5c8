"""Minimal deterministic SVG line plots of CSV columns."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Dict, List, Sequence

WIDTH, HEIGHT = 800, 480
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 130, 20, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


class PlotError(ValueError):
    pass


def read_columns(path, names: Sequence[str]) -> Dict[str, List[float]]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise PlotError(f"{path} is empty") from None
        wanted = ["t_over_T"] + list(names)
        for name in wanted:
            if name not in header:
                raise PlotError(f"unknown column {name!r} in {path}")
        pos = {name: header.index(name) for name in wanted}
        data: Dict[str, List[float]] = {name: [] for name in wanted}
        for row in reader:
            if not row:
                continue
            for name in wanted:
                data[name].append(float(row[pos[name]]))
    if not data["t_over_T"]:
        raise PlotError(f"{path} has a header but no data rows")
    return data


def nice_ticks(lo: float, hi: float, target: int = 5) -> List[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    value = first
    while value <= hi + 1e-9 * step:
        ticks.append(round(value, 12))
        value += step
    return ticks


def _tick_label(v: float) -> str:
    return format(v, ".6g")


def render_svg(data: Dict[str, List[float]], names: Sequence[str]) -> str:
    t = data["t_over_T"]
    x_lo, x_hi = min(t), max(t)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    ys = [v for name in names for v in data[name]]
    y_lo, y_hi = min(ys + [0.0]), max(ys)
    if y_hi - y_lo < 1e-12:
        y_hi = y_lo + 1.0
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x):
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return MARGIN_TOP + (1 - (y - y_lo) / (y_hi - y_lo)) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black"/>',
    ]
    for xt in nice_ticks(x_lo, x_hi):
        px = sx(xt)
        out.append(f'<line x1="{px:.2f}" y1="{MARGIN_TOP + plot_h}" x2="{px:.2f}" '
                   f'y2="{MARGIN_TOP + plot_h + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{MARGIN_TOP + plot_h + 18}" '
                   f'text-anchor="middle">{_tick_label(xt)}</text>')
    for yt in nice_ticks(y_lo, y_hi):
        py = sy(yt)
        out.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{py:.2f}" x2="{MARGIN_LEFT}" '
                   f'y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_LEFT - 8}" y="{py + 4:.2f}" '
                   f'text-anchor="end">{_tick_label(yt)}</text>')
    out.append(f'<text x="{MARGIN_LEFT + plot_w / 2:.2f}" y="{HEIGHT - 10}" '
               'text-anchor="middle">t / T</text>')
    for k, name in enumerate(names):
        color = COLORS[k % len(COLORS)]
        points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(t, data[name]))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'data-column="{name}" points="{points}"/>')
        ly = MARGIN_TOP + 15 + 18 * k
        lx = WIDTH - MARGIN_RIGHT + 10
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_csv(csv_path, names: Sequence[str], out_path) -> Path:
    """Render columns of a time-series CSV; nothing is written on error."""
    if not names:
        raise PlotError("no columns requested")
    data = read_columns(csv_path, names)
    svg = render_svg(data, names)
    out_path = Path(out_path)
    out_path.write_text(svg, encoding="utf-8")
    return out_path
