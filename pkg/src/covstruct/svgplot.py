"""Hand-emitted SVG line plots of P_cc versus K.

No plotting dependency: these are decision aids, not publication figures.
One figure per (truth, approach) with one polyline per criterion, a fixed
color cycle, gridlines, and a legend. The P_cc axis is always [0, 1].
"""

from __future__ import annotations

from xml.sax.saxutils import escape

__all__ = ["render_pcc_svg", "PALETTE"]

PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)

_WIDTH, _HEIGHT = 760, 480
_PLOT = {"left": 64, "right": 560, "top": 48, "bottom": 420}


def _x_pos(k: float, k_min: float, k_max: float) -> float:
    span = (k_max - k_min) or 1.0
    frac = (k - k_min) / span
    return _PLOT["left"] + frac * (_PLOT["right"] - _PLOT["left"])


def _y_pos(p: float) -> float:
    return _PLOT["bottom"] - p * (_PLOT["bottom"] - _PLOT["top"])


def render_pcc_svg(series: list[tuple[str, list[tuple[int, float]]]], title: str) -> str:
    """Build one SVG document.

    ``series`` is a list of (label, [(K, p_cc), ...]) polylines; points are
    plotted in the given order (pass them K-ascending). Labels and title are
    escaped. Returns the SVG as a string.
    """
    ks = sorted({k for _label, points in series for k, _p in points})
    k_min, k_max = (ks[0], ks[-1]) if ks else (0, 1)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{(_PLOT["left"] + _PLOT["right"]) / 2:.1f}" y="28" '
        f'text-anchor="middle" font-family="sans-serif" font-size="16">{escape(title)}</text>',
    ]

    # Gridlines and y ticks at 0, 0.1, ..., 1.
    for tick in range(11):
        p = tick / 10.0
        y = _y_pos(p)
        parts.append(
            f'<line x1="{_PLOT["left"]}" y1="{y:.1f}" x2="{_PLOT["right"]}" y2="{y:.1f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_PLOT["left"] - 8}" y="{y + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{p:.1f}</text>'
        )
    # X ticks at the K values present.
    for k in ks:
        x = _x_pos(k, k_min, k_max)
        parts.append(
            f'<line x1="{x:.1f}" y1="{_PLOT["bottom"]}" x2="{x:.1f}" '
            f'y2="{_PLOT["bottom"] + 5}" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{_PLOT["bottom"] + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{k}</text>'
        )

    # Axes.
    parts.append(
        f'<line x1="{_PLOT["left"]}" y1="{_PLOT["top"]}" x2="{_PLOT["left"]}" '
        f'y2="{_PLOT["bottom"]}" stroke="#333333" stroke-width="1.5"/>'
    )
    parts.append(
        f'<line x1="{_PLOT["left"]}" y1="{_PLOT["bottom"]}" x2="{_PLOT["right"]}" '
        f'y2="{_PLOT["bottom"]}" stroke="#333333" stroke-width="1.5"/>'
    )
    parts.append(
        f'<text x="{(_PLOT["left"] + _PLOT["right"]) / 2:.1f}" y="{_HEIGHT - 16}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="13">K (secondary snapshots)</text>'
    )
    parts.append(
        f'<text x="20" y="{(_PLOT["top"] + _PLOT["bottom"]) / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 20 {(_PLOT["top"] + _PLOT["bottom"]) / 2:.1f})">P_cc</text>'
    )

    # Polylines plus legend entries.
    legend_x = _PLOT["right"] + 16
    legend_y = _PLOT["top"] + 8
    for idx, (label, points) in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        coords = " ".join(
            f"{_x_pos(k, k_min, k_max):.1f},{_y_pos(p):.1f}" for k, p in points
        )
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        for k, p in points:
            parts.append(
                f'<circle cx="{_x_pos(k, k_min, k_max):.1f}" cy="{_y_pos(p):.1f}" '
                f'r="3" fill="{color}"/>'
            )
        y = legend_y + idx * 18
        parts.append(
            f'<line x1="{legend_x}" y1="{y:.1f}" x2="{legend_x + 22}" y2="{y:.1f}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{legend_x + 28}" y="{y + 4:.1f}" font-family="sans-serif" '
            f'font-size="12">{escape(label)}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
