"""Static SVG scatter plots of a dataset with its top-ranked anomalies enlarged."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
HIGHLIGHT_STROKE = "#000000"


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _axis_map(v: np.ndarray, lo_px: float, hi_px: float) -> np.ndarray:
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        return np.full(len(v), (lo_px + hi_px) / 2.0)
    return lo_px + (v - lo) / (hi - lo) * (hi_px - lo_px)


def scatter_svg(
    x,
    y,
    groups,
    highlight=None,
    *,
    x_label: str = "x",
    y_label: str = "y",
    title: str = "",
    width: int = 640,
    height: int = 480,
    radius: float = 2.0,
    highlight_radius: float = 6.0,
) -> str:
    """Render an SVG 1.1 scatter plot.

    Args:
        x, y: Coordinates, one per case.
        groups: Per-case group label; each distinct label gets a palette
            colour in sorted order (cycling when there are more than ten).
        highlight: Optional boolean mask of cases drawn enlarged, with a
            black outline, on top of the others.

    Returns:
        The SVG document. Output depends only on the inputs.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    groups = np.asarray([str(g) for g in groups], dtype=object)
    if not (len(x) == len(y) == len(groups)):
        raise ValueError("x, y and groups must have equal length")
    hl = np.zeros(len(x), dtype=bool) if highlight is None else np.asarray(highlight, dtype=bool)
    if hl.shape != x.shape:
        raise ValueError("highlight mask length does not match the data")

    margin_l, margin_r, margin_t, margin_b = 60.0, 140.0, 40.0, 50.0
    px = _axis_map(x, margin_l, width - margin_r)
    py = _axis_map(y, height - margin_b, margin_t)
    names = sorted(set(groups.tolist()))
    colour = {g: PALETTE[i % len(PALETTE)] for i, g in enumerate(names)}

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        out.append(f'<text x="{_fmt(width / 2)}" y="24" text-anchor="middle" font-size="14">{escape(title)}</text>')
    x0, x1 = margin_l, width - margin_r
    y0, y1 = height - margin_b, margin_t
    out.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y0)}" stroke="#000000"/>')
    out.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0)}" y2="{_fmt(y1)}" stroke="#000000"/>')
    out.append(f'<text x="{_fmt((x0 + x1) / 2)}" y="{_fmt(height - 12)}" text-anchor="middle" font-size="12">{escape(x_label)}</text>')
    out.append(
        f'<text x="16" y="{_fmt((y0 + y1) / 2)}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {_fmt((y0 + y1) / 2)})">{escape(y_label)}</text>'
    )
    for v, pos in ((x.min(), x0), (x.max(), x1)):
        out.append(f'<text x="{_fmt(pos)}" y="{_fmt(y0 + 16)}" text-anchor="middle" font-size="10">{v:.4g}</text>')
    for v, pos in ((y.min(), y0), (y.max(), y1)):
        out.append(f'<text x="{_fmt(x0 - 6)}" y="{_fmt(pos + 3)}" text-anchor="end" font-size="10">{v:.4g}</text>')

    out.append('<g id="cases">')
    for i in np.flatnonzero(~hl):
        out.append(f'<circle cx="{_fmt(px[i])}" cy="{_fmt(py[i])}" r="{_fmt(radius)}" fill="{colour[groups[i]]}" fill-opacity="0.6"/>')
    out.append("</g>")
    out.append('<g id="top">')
    for i in np.flatnonzero(hl):
        out.append(
            f'<circle cx="{_fmt(px[i])}" cy="{_fmt(py[i])}" r="{_fmt(highlight_radius)}" '
            f'fill="{colour[groups[i]]}" stroke="{HIGHLIGHT_STROKE}" stroke-width="1.5" data-id="{i + 1}"/>'
        )
    out.append("</g>")

    out.append('<g id="legend" font-size="11">')
    lx = width - margin_r + 16
    for j, g in enumerate(names):
        ly = margin_t + 10 + 18 * j
        out.append(f'<circle cx="{_fmt(lx)}" cy="{_fmt(ly)}" r="5" fill="{colour[g]}"/>')
        out.append(f'<text x="{_fmt(lx + 10)}" y="{_fmt(ly + 4)}">{escape(g)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
