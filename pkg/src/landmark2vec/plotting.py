"""Deterministic SVG scatter plots of landmark maps.

Hand-rolled SVG so identical inputs always produce identical bytes; one
labeled circle per landmark, optional second panel for side-by-side
comparison of a true and an estimated map.
"""

from __future__ import annotations

import numpy as np

from .data import LandmarkMap

PANEL_SIZE = 420
PANEL_PAD = 48
POINT_RADIUS = 4


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _panel(lmap: LandmarkMap, title: str, x_offset: int) -> list[str]:
    coords = lmap.coords[:, :2]
    low = coords.min(axis=0)
    high = coords.max(axis=0)
    span = np.maximum(high - low, 1e-9)
    pad = 0.08 * span.max()
    low = low - pad
    span = span + 2 * pad
    scale = (PANEL_SIZE - 2 * PANEL_PAD) / span.max()

    def to_px(p):
        x = x_offset + PANEL_PAD + (p[0] - low[0]) * scale
        y = PANEL_SIZE - PANEL_PAD - (p[1] - low[1]) * scale  # svg y grows downward
        return x, y

    parts = [
        f'<text x="{x_offset + PANEL_SIZE / 2:.0f}" y="24" text-anchor="middle" '
        f'font-size="16" font-family="sans-serif">{title}</text>'
    ]
    for lid, p in zip(lmap.landmark_ids, coords):
        x, y = to_px(p)
        parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{POINT_RADIUS}" '
            f'fill="steelblue"/>'
        )
        parts.append(
            f'<text x="{_fmt(x + 6)}" y="{_fmt(y - 6)}" font-size="11" '
            f'font-family="sans-serif">{lid}</text>'
        )
    return parts


def render_svg(lmap: LandmarkMap, second: LandmarkMap | None = None,
               titles: tuple[str, str] = ("true map", "estimated map")) -> str:
    """Render one map, or two maps side by side, as an SVG document."""
    panels = 1 if second is None else 2
    width = PANEL_SIZE * panels
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{PANEL_SIZE}" viewBox="0 0 {width} {PANEL_SIZE}">',
        f'<rect width="{width}" height="{PANEL_SIZE}" fill="white"/>',
    ]
    parts.extend(_panel(lmap, titles[0] if second is not None else "landmark map", 0))
    if second is not None:
        parts.append(
            f'<line x1="{PANEL_SIZE}" y1="0" x2="{PANEL_SIZE}" y2="{PANEL_SIZE}" '
            f'stroke="#cccccc"/>'
        )
        parts.extend(_panel(second, titles[1], PANEL_SIZE))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
