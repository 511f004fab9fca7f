"""Self-contained SVG line plots and heatmaps."""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape, quoteattr

from .exceptions import OutputError

logger = logging.getLogger(__name__)

WIDTH = 720
HEIGHT = 480
MARGIN_LEFT = 70
MARGIN_RIGHT = 170
MARGIN_TOP = 40
MARGIN_BOTTOM = 60
TICKS = 5
PADDING = 0.05

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#ff7f0e",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)


@dataclass(frozen=True)
class Series:
    """A labeled curve of (x, y) points."""

    label: str
    points: Sequence[Tuple[float, float]]


def angle_label(angle: float, symbol: str = "α") -> str:
    """Legend text such as ``α=0``, ``α=π/4`` or ``α=0.3``."""
    ratio = Fraction(angle / math.pi).limit_denominator(16)
    if abs(float(ratio) * math.pi - angle) > 1e-9:
        return f"{symbol}={angle:.3g}"
    if ratio == 0:
        return f"{symbol}=0"
    numerator = "" if ratio.numerator == 1 else str(ratio.numerator)
    if ratio.denominator == 1:
        return f"{symbol}={numerator}π"
    return f"{symbol}={numerator}π/{ratio.denominator}"


class SvgCanvas:
    """Accumulates SVG elements into a single document string."""

    def __init__(self, width: int = WIDTH, height: int = HEIGHT) -> None:
        self.width = width
        self.height = height
        self.svg = (
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
            f'<svg version="1.1" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" xmlns="http://www.w3.org/2000/svg">\n'
            f'<rect class="background" x="0" y="0" width="{width}" height="{height}" fill="white"/>\n'
        )

    def line(self, x1: float, y1: float, x2: float, y2: float, stroke: str = "black", extra: str = "") -> None:
        self.svg += (
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{stroke}" {extra}/>\n'
        )

    def polyline(self, points: Sequence[Tuple[float, float]], stroke: str, label: str) -> None:
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        attr = quoteattr(label)
        self.svg += (
            f'<polyline class="series" data-label={attr} '
            f'points="{coords}" fill="none" stroke="{stroke}" stroke-width="2"/>\n'
        )

    def filled_rectangle(
        self, x1: float, y1: float, x2: float, y2: float, fill: str, extra: str = ""
    ) -> None:
        self.svg += (
            f'<rect x="{x1:.2f}" y="{y1:.2f}" width="{x2 - x1:.2f}" height="{y2 - y1:.2f}" '
            f'fill="{fill}" {extra}/>\n'
        )

    def text(self, x: float, y: float, string: str, extra: str = "") -> None:
        self.svg += f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" font-size="12" {extra}>{escape(string)}</text>\n'

    def raw(self, content: str) -> None:
        self.svg += content

    def get_svg(self) -> str:
        return f"{self.svg}</svg>\n"

    def save(self, path: str) -> None:
        try:
            with open(path, "w", encoding="utf-8") as f:
                f.write(self.get_svg())
        except OSError as e:
            raise OutputError(f"Failed to write SVG {path}", str(e))
        logger.info("Wrote %s", path)


def _padded_range(values: Sequence[float]) -> Tuple[float, float]:
    low, high = min(values), max(values)
    span = high - low
    if span == 0.0:
        span = abs(low) if low != 0.0 else 1.0
    return low - PADDING * span, high + PADDING * span


def _ticks(low: float, high: float) -> List[float]:
    if low == high:
        return [low]
    return [low + (high - low) * i / (TICKS - 1) for i in range(TICKS)]


class _Frame:
    """Maps data coordinates into the plotting area."""

    def __init__(self, canvas: SvgCanvas, x_range: Tuple[float, float], y_range: Tuple[float, float]) -> None:
        self.canvas = canvas
        self.x_range = x_range
        self.y_range = y_range
        self.left = MARGIN_LEFT
        self.right = canvas.width - MARGIN_RIGHT
        self.top = MARGIN_TOP
        self.bottom = canvas.height - MARGIN_BOTTOM

    def x(self, value: float) -> float:
        low, high = self.x_range
        return self.left + (value - low) / (high - low) * (self.right - self.left)

    def y(self, value: float) -> float:
        low, high = self.y_range
        return self.bottom - (value - low) / (high - low) * (self.bottom - self.top)

    def draw_axes(self, x_label: str, y_label: str, title: str, x_ticks: Sequence[float], y_ticks: Sequence[float]) -> None:
        canvas = self.canvas
        canvas.line(self.left, self.bottom, self.right, self.bottom, extra='class="axis"')
        canvas.line(self.left, self.top, self.left, self.bottom, extra='class="axis"')
        for value in x_ticks:
            x = self.x(value)
            canvas.line(x, self.bottom, x, self.bottom + 5, extra='class="tick"')
            canvas.text(x, self.bottom + 20, f"{value:.3g}", 'text-anchor="middle" class="tick-label"')
        for value in y_ticks:
            y = self.y(value)
            canvas.line(self.left - 5, y, self.left, y, extra='class="tick"')
            canvas.text(self.left - 8, y + 4, f"{value:.3g}", 'text-anchor="end" class="tick-label"')
        canvas.text((self.left + self.right) / 2, canvas.height - 15, x_label, 'text-anchor="middle"')
        mid = (self.top + self.bottom) / 2
        canvas.text(18, mid, y_label, f'text-anchor="middle" transform="rotate(-90 18 {mid:.2f})"')
        if title:
            canvas.text((self.left + self.right) / 2, 22, title, 'text-anchor="middle" font-weight="bold"')


def emit_svg_lineplot(
    curves: Sequence[Series],
    path: str,
    x_label: str = "φ (rad)",
    y_label: str = "intensity",
    title: str = "",
) -> None:
    """Render one polyline per series with axes, ticks and a legend.

    Axis ranges extend 5% beyond the data on each side.

    Raises:
        OutputError: If there are no series, a series is empty or non-finite,
            or the file cannot be written.
    """
    if not curves:
        raise OutputError("Cannot plot an empty series set")
    xs: List[float] = []
    ys: List[float] = []
    for series in curves:
        if not series.points:
            raise OutputError(f"Series {series.label!r} has no points")
        for x, y in series.points:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise OutputError(f"Series {series.label!r} has a non-finite point ({x!r}, {y!r})")
            xs.append(x)
            ys.append(y)

    canvas = SvgCanvas()
    frame = _Frame(canvas, _padded_range(xs), _padded_range(ys))
    frame.draw_axes(
        x_label,
        y_label,
        title,
        _ticks(min(xs), max(xs)),
        _ticks(min(ys), max(ys)),
    )

    legend_x = frame.right + 20
    for index, series in enumerate(curves):
        color = PALETTE[index % len(PALETTE)]
        canvas.polyline([(frame.x(x), frame.y(y)) for x, y in series.points], color, series.label)
        legend_y = frame.top + 10 + 20 * index
        canvas.line(legend_x, legend_y, legend_x + 20, legend_y, stroke=color, extra='stroke-width="2" class="legend"')
        canvas.text(legend_x + 26, legend_y + 4, series.label, 'class="legend-label"')

    canvas.save(path)


def _gray(value: float) -> str:
    level = int(round(255 * min(1.0, max(0.0, value))))
    return f"rgb({level},{level},{level})"


def emit_svg_heatmap(
    grid: Sequence[Sequence[float]],
    path: str,
    row_values: Optional[Sequence[float]] = None,
    column_values: Optional[Sequence[float]] = None,
    x_label: str = "φ (rad)",
    y_label: str = "α (rad)",
    title: str = "",
) -> None:
    """Render a grid of intensities in [0, 1] as grayscale cells (0 black, 1 white).

    Rows run bottom to top, columns left to right. A color bar sits to the right.

    Raises:
        OutputError: If the grid is empty, ragged, out of range, or the file
            cannot be written.
    """
    if not grid or not grid[0]:
        raise OutputError("Cannot plot an empty grid")
    n_cols = len(grid[0])
    for index, row in enumerate(grid):
        if len(row) != n_cols:
            raise OutputError(f"Ragged grid: row {index} has {len(row)} cells, expected {n_cols}")
        for value in row:
            if not (math.isfinite(value) and -1e-9 <= value <= 1.0 + 1e-9):
                raise OutputError(f"Heatmap value {value!r} lies outside [0, 1]")
    n_rows = len(grid)
    rows = list(row_values) if row_values is not None else list(range(n_rows))
    cols = list(column_values) if column_values is not None else list(range(n_cols))
    if len(rows) != n_rows or len(cols) != n_cols:
        raise OutputError("Axis values do not match the grid shape")

    canvas = SvgCanvas()
    frame = _Frame(canvas, (0.0, float(n_cols)), (0.0, float(n_rows)))
    for i, row in enumerate(grid):
        for j, value in enumerate(row):
            canvas.filled_rectangle(
                frame.x(j), frame.y(i + 1), frame.x(j + 1), frame.y(i), _gray(value), 'class="cell"'
            )

    canvas.line(frame.left, frame.bottom, frame.right, frame.bottom, extra='class="axis"')
    canvas.line(frame.left, frame.top, frame.left, frame.bottom, extra='class="axis"')
    for j in sorted({0, n_cols // 2, n_cols - 1}):
        canvas.text(frame.x(j + 0.5), frame.bottom + 20, f"{cols[j]:.3g}", 'text-anchor="middle" class="tick-label"')
    for i in sorted({0, n_rows // 2, n_rows - 1}):
        canvas.text(frame.left - 8, frame.y(i + 0.5) + 4, f"{rows[i]:.3g}", 'text-anchor="end" class="tick-label"')
    canvas.text((frame.left + frame.right) / 2, canvas.height - 15, x_label, 'text-anchor="middle"')
    mid = (frame.top + frame.bottom) / 2
    canvas.text(18, mid, y_label, f'text-anchor="middle" transform="rotate(-90 18 {mid:.2f})"')
    if title:
        canvas.text((frame.left + frame.right) / 2, 22, title, 'text-anchor="middle" font-weight="bold"')

    bar_x = frame.right + 30
    canvas.raw(
        '<defs><linearGradient id="colorbar" x1="0" y1="1" x2="0" y2="0">'
        '<stop offset="0" stop-color="black"/><stop offset="1" stop-color="white"/>'
        "</linearGradient></defs>\n"
    )
    canvas.filled_rectangle(
        bar_x, frame.top, bar_x + 20, frame.bottom, "url(#colorbar)", 'class="colorbar" stroke="black"'
    )
    canvas.text(bar_x + 26, frame.top + 4, "1")
    canvas.text(bar_x + 26, frame.bottom + 4, "0")

    canvas.save(path)
