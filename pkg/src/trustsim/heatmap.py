"""Dependency-free SVG heatmaps of aggregated sweep grids."""

from __future__ import annotations

from pathlib import Path

from .experiments import METRICS, GridResult

CELL = 80
MARGIN_LEFT = 70
MARGIN_TOP = 40
MARGIN_BOTTOM = 30

# palette anchors (fixed for reproducible images)
SEQ_LOW = (255, 255, 255)
SEQ_HIGH = (26, 152, 80)
DIV_NEG = (233, 163, 201)   # pink
DIV_MID = (255, 255, 255)
DIV_POS = (161, 215, 106)   # green


def _lerp(a, b, t):
    return tuple(round(a[i] + (b[i] - a[i]) * t) for i in range(3))


def _rgb(color):
    return f"rgb({color[0]},{color[1]},{color[2]})"


def _cell_color(value: float, vmin: float, vmax: float, diverging: bool) -> str:
    if diverging:
        extent = max(abs(vmin), abs(vmax)) or 1.0
        t = value / extent
        if t >= 0:
            return _rgb(_lerp(DIV_MID, DIV_POS, min(t, 1.0)))
        return _rgb(_lerp(DIV_MID, DIV_NEG, min(-t, 1.0)))
    span = (vmax - vmin) or 1.0
    return _rgb(_lerp(SEQ_LOW, SEQ_HIGH, (value - vmin) / span))


def render_heatmap(grid: GridResult, metric: str) -> str:
    """SVG heatmap: prior mean ascending left-to-right, c ascending
    bottom-to-top, one rect and numeric label per cell. Uses a diverging
    palette when any value is negative (diff grids)."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")

    entries = []
    for (variant, c, prior), stats in grid.cells.items():
        prior_mean = prior[0] / (prior[0] + prior[1])
        entries.append((c, prior_mean, stats.means[metric]))
    if not entries:
        raise ValueError("grid has no cells to plot")

    c_values = sorted({e[0] for e in entries})
    prior_means = sorted({e[1] for e in entries})
    values = [e[2] for e in entries]
    vmin, vmax = min(values), max(values)
    diverging = vmin < 0

    width = MARGIN_LEFT + CELL * len(prior_means) + 10
    height = MARGIN_TOP + CELL * len(c_values) + MARGIN_BOTTOM
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{MARGIN_LEFT + CELL * len(prior_means) / 2}" y="20" '
        f'text-anchor="middle" font-size="14">{metric}</text>',
    ]
    for (c, pm, val) in entries:
        col = prior_means.index(pm)
        row = len(c_values) - 1 - c_values.index(c)  # c ascending upward
        x = MARGIN_LEFT + col * CELL
        y = MARGIN_TOP + row * CELL
        color = _cell_color(val, vmin, vmax, diverging)
        parts.append(f'<rect class="cell" x="{x}" y="{y}" width="{CELL}" '
                     f'height="{CELL}" fill="{color}" stroke="#888"/>')
        parts.append(f'<text x="{x + CELL / 2}" y="{y + CELL / 2 + 4}" '
                     f'text-anchor="middle" font-size="12">{val:.3f}</text>')
    for i, c in enumerate(c_values):
        row = len(c_values) - 1 - i
        y = MARGIN_TOP + row * CELL + CELL / 2 + 4
        parts.append(f'<text x="{MARGIN_LEFT - 10}" y="{y}" text-anchor="end" '
                     f'font-size="12">c={c:g}</text>')
    for col, pm in enumerate(prior_means):
        x = MARGIN_LEFT + col * CELL + CELL / 2
        y = MARGIN_TOP + CELL * len(c_values) + 18
        parts.append(f'<text x="{x}" y="{y}" text-anchor="middle" '
                     f'font-size="12">{pm:.2f}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def write_heatmap(grid: GridResult, metric: str, path: str | Path) -> None:
    Path(path).write_text(render_heatmap(grid, metric))
