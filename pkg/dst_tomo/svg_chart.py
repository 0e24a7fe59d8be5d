#!/usr/bin/env python

"""
Self-contained SVG chart of a sweep: E_min against lambda.

Drawn: the Monte-Carlo curve of the swept ensemble (solid, with markers),
the closed-form pure-state curve sqrt(pure_average) (dashed), the SIC
references for pure and mixed states (horizontal) and the pure-state
crossover (vertical).
"""

from __future__ import annotations

import logging
import math
from typing import List, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from .crb import pure_average
from .model import MeasurementStrength
from .sampling import Ensemble

logger = logging.getLogger("dst_tomo.svg_chart")

WIDTH, HEIGHT = 640, 420
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 60, 20, 30, 50
CLOSED_FORM_POINTS = 200


class _Frame:
    ''' Maps data coordinates to SVG pixels. '''

    def __init__(self, x_range: Tuple[float, float], y_range: Tuple[float, float]):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range

    def x(self, value: float) -> float:
        return MARGIN_LEFT + (value - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)

    def y(self, value: float) -> float:
        return HEIGHT - MARGIN_BOTTOM - (value - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)

    def points(self, xs: Sequence[float], ys: Sequence[float]) -> str:
        return " ".join(f"{self.x(a):.2f},{self.y(b):.2f}" for a, b in zip(xs, ys))


def _ticks(low: float, high: float, count: int = 5) -> List[float]:
    return [low + (high - low) * i / count for i in range(count + 1)]


def sweep_chart(rows, ensemble: Ensemble, crossover: float) -> str:
    '''
    :param rows: ``SweepRow`` objects in grid order
    :param crossover: lambda of the pure-state DST/SIC crossover
    :return: the SVG document
    '''
    lams = [row.lam for row in rows]
    e_min = [row.e_min_mc for row in rows]
    e_sic_mixed = rows[0].e_sic_mixed
    e_sic_pure = rows[0].e_sic_pure

    closed_lams = np.linspace(0.0, max(max(lams), crossover), CLOSED_FORM_POINTS)
    closed = [math.sqrt(pure_average(MeasurementStrength.from_lambda(lam))) for lam in closed_lams]

    y_high = 1.1 * max(max(e_min), max(closed), e_sic_pure, e_sic_mixed)
    frame = _Frame((0.0, 1.0), (0.0, y_high))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<g stroke="black" stroke-width="1">'
        f'<line x1="{frame.x(0):.2f}" y1="{frame.y(0):.2f}" x2="{frame.x(1):.2f}" y2="{frame.y(0):.2f}"/>'
        f'<line x1="{frame.x(0):.2f}" y1="{frame.y(0):.2f}" x2="{frame.x(0):.2f}" y2="{frame.y(y_high):.2f}"/></g>',
    ]
    label = 'font-family="sans-serif" font-size="11"'
    for tick in _ticks(0.0, 1.0):
        parts.append(
            f'<text x="{frame.x(tick):.2f}" y="{frame.y(0) + 16:.2f}" text-anchor="middle" {label}>{tick:.1f}</text>'
        )
    for tick in _ticks(0.0, y_high):
        parts.append(
            f'<text x="{frame.x(0) - 6:.2f}" y="{frame.y(tick) + 4:.2f}" text-anchor="end" {label}>{tick:.2f}</text>'
        )
    parts.append(
        f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle" {label}>lambda = cos(2 theta)</text>'
    )
    parts.append(
        f'<text x="14" y="{HEIGHT / 2:.0f}" transform="rotate(-90 14 {HEIGHT / 2:.0f})" '
        f'text-anchor="middle" {label}>E_min</text>'
    )

    for value, colour, name in ((e_sic_pure, "#d62728", "SIC pure"), (e_sic_mixed, "#1f77b4", "SIC mixed")):
        parts.append(
            f'<line class="sic" x1="{frame.x(0):.2f}" y1="{frame.y(value):.2f}" x2="{frame.x(1):.2f}" '
            f'y2="{frame.y(value):.2f}" stroke="{colour}" stroke-width="1" stroke-dasharray="2,3"/>'
        )
        parts.append(
            f'<text x="{frame.x(1) - 4:.2f}" y="{frame.y(value) - 4:.2f}" text-anchor="end" {label} '
            f'fill="{colour}">{escape(name)}</text>'
        )

    parts.append(
        f'<line class="crossover" x1="{frame.x(crossover):.2f}" y1="{frame.y(0):.2f}" x2="{frame.x(crossover):.2f}" '
        f'y2="{frame.y(y_high):.2f}" stroke="gray" stroke-width="1"/>'
    )
    parts.append(
        f'<polyline class="closed-form" points="{frame.points(closed_lams, closed)}" fill="none" '
        f'stroke="#d62728" stroke-width="1.5" stroke-dasharray="6,4"/>'
    )
    colour = "#d62728" if ensemble is Ensemble.PURE_HAAR else "#1f77b4"
    parts.append(
        f'<polyline class="monte-carlo" points="{frame.points(lams, e_min)}" fill="none" '
        f'stroke="{colour}" stroke-width="2"/>'
    )
    for lam, value in zip(lams, e_min):
        parts.append(f'<circle cx="{frame.x(lam):.2f}" cy="{frame.y(value):.2f}" r="2.5" fill="{colour}"/>')
    parts.append(
        f'<text x="{frame.x(0.02):.2f}" y="{MARGIN_TOP - 10}" {label}>'
        f'{escape(ensemble.value)} states, {rows[0].samples} samples, crossover {crossover:.4f}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_sweep_chart(rows, path: str, ensemble: Ensemble, crossover: float):
    '''
    :raises OSError: if the file cannot be written
    '''
    if not rows:
        raise ValueError("Cannot draw a chart without sweep rows.")
    document = sweep_chart(rows, ensemble, crossover)
    try:
        with open(path, "w") as handle:
            handle.write(document)
    except OSError as e:
        raise OSError(f"Could not write the sweep chart to '{path}': {e}") from e
    logger.debug(f"chart with {len(rows)} point(s) written to {path}")


__all__ = ["sweep_chart", "write_sweep_chart"]
