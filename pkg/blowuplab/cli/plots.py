import logging
from pathlib import Path
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from blowuplab.core.errors import DomainError
from blowuplab.html.render import render

from .types import Series

logger = logging.getLogger(__name__)

WIDTH, HEIGHT = 640, 420
MARGIN = 64
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


class Axis(NamedTuple):
    log: bool
    lo: float
    hi: float

    def position(self, values: np.ndarray, length: float) -> np.ndarray:
        v = np.log10(values) if self.log else values
        return (v - self.lo) / (self.hi - self.lo) * length

    def ticks(self) -> List[tuple]:
        """(coordinate in axis units, label) pairs"""
        if self.log:
            decades = np.arange(np.ceil(self.lo), np.floor(self.hi) + 1)
            step = max(1, int(np.ceil(len(decades) / 8)))
            return [(float(d), f"1e{int(d)}") for d in decades[::step]]
        return [(float(v), f"{v:.3g}") for v in np.linspace(self.lo, self.hi, 5)]


def _axis(values: np.ndarray, log: bool) -> Axis:
    v = np.log10(values) if log else values
    lo, hi = float(np.min(v)), float(np.max(v))
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    return Axis(log, lo, hi)


def _usable(series: Series, log_x: bool, log_y: bool):
    x, y = np.asarray(series.x, dtype=float), np.asarray(series.y, dtype=float)
    keep = np.isfinite(x) & np.isfinite(y)
    if log_x:
        keep &= x > 0
    if log_y:
        keep &= y > 0
    return x[keep], y[keep]


def loglog_slope(series: Series) -> float:
    x, y = _usable(series, True, True)
    if len(x) < 2:
        raise DomainError(f"Series {series.label} has fewer than 2 positive points")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def emit_plot(
    series: Sequence[Series],
    path: Path,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    log_x: bool = False,
    log_y: bool = False,
    slope: Optional[float] = None,
) -> Path:
    """
    Writes an SVG 1.1 line plot. With both axes logarithmic the slope of the first series is
    annotated unless an explicit slope is given.
    """
    cleaned = [(s, *_usable(s, log_x, log_y)) for s in series]
    cleaned = [c for c in cleaned if len(c[1]) > 0]
    if not cleaned:
        raise DomainError("Cannot plot an empty series list")
    all_x = np.concatenate([c[1] for c in cleaned])
    all_y = np.concatenate([c[2] for c in cleaned])
    ax, ay = _axis(all_x, log_x), _axis(all_y, log_y)
    inner_w, inner_h = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    lines = []
    for index, (s, x, y) in enumerate(cleaned):
        px = MARGIN + ax.position(x, inner_w)
        py = HEIGHT - MARGIN - ay.position(y, inner_h)
        points = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        lines.append(
            {"label": s.label, "points": points, "style": s.style, "color": COLORS[index % len(COLORS)],
             "markers": list(zip(px.round(2), py.round(2)))}
        )
    if slope is None and log_x and log_y and len(cleaned[0][1]) >= 2:
        slope = loglog_slope(cleaned[0][0])
    x_ticks = [(MARGIN + (v - ax.lo) / (ax.hi - ax.lo) * inner_w, label) for v, label in ax.ticks()]
    y_ticks = [(HEIGHT - MARGIN - (v - ay.lo) / (ay.hi - ay.lo) * inner_h, label) for v, label in ay.ticks()]
    svg = render(
        "plot.svg.j2",
        width=WIDTH,
        height=HEIGHT,
        margin=MARGIN,
        title=title,
        x_label=x_label,
        y_label=y_label,
        lines=lines,
        x_ticks=x_ticks,
        y_ticks=y_ticks,
        slope=None if slope is None else f"slope {slope:.4g}",
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(svg)
    logger.debug("Wrote plot %s with %d series", path, len(lines))
    return path
