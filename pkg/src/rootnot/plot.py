"""Self-contained SVG line plots, byte-deterministic for identical input.

The writer renders one axis pair, one ``<polyline>`` per curve and a
legend, with no timestamps, random ids or library-version artifacts, so a
plot regenerated from the same data is byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["PlotCurve", "emit_plot", "render_plot_svg"]

_WIDTH = 860
_HEIGHT = 520
_MARGIN_LEFT = 72
_MARGIN_RIGHT = 28
_MARGIN_TOP = 44
_MARGIN_BOTTOM = 56

_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)


@dataclass(frozen=True)
class PlotCurve:
    label: str
    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if not self.x or len(self.x) != len(self.y):
            raise ValueError("curve needs matching, non-empty x and y")


def _ticks(low: float, high: float, count: int = 5) -> list[float]:
    if high <= low:
        return [low]
    step = (high - low) / (count - 1)
    return [low + i * step for i in range(count)]


def _num(value: float) -> str:
    return format(value, ".6g")


def _coord(value: float) -> str:
    return format(value, ".2f")


def render_plot_svg(
    curves: list[PlotCurve],
    title: str = "",
    x_label: str = "trial",
    y_label: str = "merit",
) -> str:
    """Render curves to SVG text; raises on an empty curve list."""
    if not curves:
        raise ValueError("nothing to plot")
    x_min = min(min(c.x) for c in curves)
    x_max = max(max(c.x) for c in curves)
    y_min = min(0.0, min(min(c.y) for c in curves))
    y_max = max(1.0, max(max(c.y) for c in curves))
    if x_max == x_min:
        x_max = x_min + 1.0
    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(x: float) -> float:
        return _MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w

    def sy(y: float) -> float:
        return _MARGIN_TOP + (y_max - y) / (y_max - y_min) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>',
    ]
    left, right = _MARGIN_LEFT, _WIDTH - _MARGIN_RIGHT
    top, bottom = _MARGIN_TOP, _HEIGHT - _MARGIN_BOTTOM
    for y_tick in _ticks(y_min, y_max):
        py = _coord(sy(y_tick))
        parts.append(
            f'<line x1="{left}" y1="{py}" x2="{right}" y2="{py}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{left - 8}" y="{py}" font-size="12" text-anchor="end" '
            f'dominant-baseline="middle" fill="#333333">{_num(y_tick)}</text>'
        )
    for x_tick in _ticks(x_min, x_max):
        px = _coord(sx(x_tick))
        parts.append(
            f'<line x1="{px}" y1="{bottom}" x2="{px}" y2="{bottom + 5}" '
            f'stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px}" y="{bottom + 20}" font-size="12" text-anchor="middle" '
            f'fill="#333333">{_num(x_tick)}</text>'
        )
    parts.append(
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" '
        f'stroke="#333333" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" '
        f'stroke="#333333" stroke-width="1"/>'
    )
    if title:
        parts.append(
            f'<text x="{_WIDTH // 2}" y="{top - 18}" font-size="15" '
            f'text-anchor="middle" fill="#000000">{title}</text>'
        )
    parts.append(
        f'<text x="{(left + right) // 2}" y="{_HEIGHT - 14}" font-size="13" '
        f'text-anchor="middle" fill="#000000">{x_label}</text>'
    )
    parts.append(
        f'<text x="18" y="{(top + bottom) // 2}" font-size="13" text-anchor="middle" '
        f'fill="#000000" transform="rotate(-90 18 {(top + bottom) // 2})">{y_label}</text>'
    )
    for i, curve in enumerate(curves):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(f"{_coord(sx(x))},{_coord(sy(y))}" for x, y in zip(curve.x, curve.y))
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
    legend_x = right - 150
    legend_y = top + 10
    for i, curve in enumerate(curves):
        color = _PALETTE[i % len(_PALETTE)]
        y = legend_y + 18 * i
        parts.append(
            f'<line x1="{legend_x}" y1="{y}" x2="{legend_x + 26}" y2="{y}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{legend_x + 32}" y="{y + 4}" font-size="12" '
            f'fill="#000000">{curve.label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_plot(
    curves: list[PlotCurve],
    path: str,
    title: str = "",
    x_label: str = "trial",
    y_label: str = "merit",
) -> None:
    """Write the SVG rendering of ``curves`` to ``path``."""
    svg = render_plot_svg(curves, title=title, x_label=x_label, y_label=y_label)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(svg)
