"""Brute-force oracles, independent of the analytic limit code.

Envelopes come from dense sampling of ess-inf/ess-sup over shrinking
windows; Clarke derivatives from limsup difference quotients of the exact
primitive.  Both extrapolate linearly to zero window / step size through the
two smallest values.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from wentzell.constants import ORACLE_GRID, ORACLE_SAMPLES, ORACLE_STEPS, ORACLE_WINDOWS
from wentzell.graphlib.graph import PiecewiseGraph, potential_many
from wentzell.models import Envelope


def _extrapolate(sizes: Sequence[float], values: Sequence[float]) -> float:
    """Value at size 0 of the line through the last two (size, value) pairs."""
    (h1, v1), (h2, v2) = (sizes[-2], values[-2]), (sizes[-1], values[-1])
    return (h1 * v2 - h2 * v1) / (h1 - h2)


def envelope_oracle(
    g: PiecewiseGraph,
    value: float,
    windows: Sequence[float] = ORACLE_WINDOWS,
    samples: int = ORACLE_SAMPLES,
) -> Envelope:
    """ess-inf / ess-sup of gamma over |s - t| < mu, extrapolated to mu = 0.

    An even sample count keeps the center itself out of every window.
    """
    offsets = np.linspace(-1.0, 1.0, samples + samples % 2)
    lows, highs = [], []
    for mu in windows:
        vals = g.eval_many(value + mu * offsets)
        lows.append(float(vals.min()))
        highs.append(float(vals.max()))
    lo = _extrapolate(windows, lows)
    hi = _extrapolate(windows, highs)
    return Envelope(min(lo, hi), max(lo, hi))


def _quotient_max(
    g: PiecewiseGraph, value: float, direction: float, step: float, grid: np.ndarray
) -> np.ndarray:
    """Difference quotients (phi(w + h v) - phi(w)) / h over w = t + h |v| grid."""
    w = value + step * abs(direction) * grid
    return (potential_many(g, w + step * direction) - potential_many(g, w)) / step


def clarke_dd_oracle(
    g: PiecewiseGraph,
    value: float,
    direction: float,
    steps: Sequence[float] = ORACLE_STEPS,
    grid_size: int = ORACLE_GRID,
) -> float:
    """limsup_{w -> t, h -> 0+} (phi(w + h v) - phi(w)) / h."""
    if direction == 0:
        return 0.0
    grid = np.linspace(-2.0, 2.0, grid_size)
    maxima = [float(_quotient_max(g, value, direction, h, grid).max()) for h in steps]
    return _extrapolate(steps, maxima)


def product_clarke_dd_oracle(
    g1: PiecewiseGraph,
    g2: PiecewiseGraph,
    t1: float,
    t2: float,
    v1: float,
    v2: float,
    steps: Sequence[float] = ORACLE_STEPS,
    grid_size: int = 41,
) -> float:
    """Same limsup for phi1(t1) + phi2(t2), taken over a 2D grid of base points."""
    grid = np.linspace(-2.0, 2.0, grid_size)
    maxima = []
    for h in steps:
        q1 = (
            _quotient_max(g1, t1, v1, h, grid)
            if v1 != 0
            else np.zeros_like(grid)
        )
        q2 = (
            _quotient_max(g2, t2, v2, h, grid)
            if v2 != 0
            else np.zeros_like(grid)
        )
        maxima.append(float((q1[:, None] + q2[None, :]).max()))
    return _extrapolate(steps, maxima)


def random_polynomial_graph(
    rng: np.random.Generator,
    max_breakpoints: int = 5,
    max_degree: int = 3,
    span: float = 3.0,
) -> PiecewiseGraph:
    """Random piecewise polynomial graph with separated breakpoints."""
    count = int(rng.integers(0, max_breakpoints + 1))
    uppers: list[float] = []
    while len(uppers) < count:
        candidate = round(float(rng.uniform(-span, span)), 3)
        if all(abs(candidate - u) > 0.2 for u in uppers):
            uppers.append(candidate)
    uppers.sort()

    def _poly() -> str:
        degree = int(rng.integers(0, max_degree + 1))
        coeffs = np.round(rng.uniform(-2.0, 2.0, degree + 1), 3)
        return " + ".join(f"({float(c)!r})*t**{k}" for k, c in enumerate(coeffs))

    pieces = [(u, _poly()) for u in uppers]
    convention = "right" if rng.random() < 0.5 else "left"
    return PiecewiseGraph.from_pieces(pieces, _poly(), convention=convention)
