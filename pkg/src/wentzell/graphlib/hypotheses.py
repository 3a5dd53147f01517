"""Sampled checks of the growth, sign and gradient-growth hypotheses on the graphs."""

from __future__ import annotations

import logging

import numpy as np

from wentzell.constants import HYPOTHESIS_RANGE, HYPOTHESIS_SAMPLES
from wentzell.errors import DomainError
from wentzell.graphlib.graph import PiecewiseGraph
from wentzell.models import GrowthParams, GrowthReport, RauchReport, SignConditionReport

logger = logging.getLogger(__name__)

Interval = tuple[float, float]


def _sample_points(g: PiecewiseGraph, interval: Interval, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Grid points plus every breakpoint in range, with envelope bounds at each."""
    lo, hi = interval
    if n < 2:
        raise DomainError(f"need at least 2 samples, got {n}")
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi < lo:
        raise DomainError(f"range must be a bounded interval, got {interval}")
    grid = np.linspace(lo, hi, n)
    inside = g.breakpoints[g.breakpoints_in(lo, hi)]
    ts = np.unique(np.concatenate([grid, inside]))
    env_lo, env_hi = g.envelope_many(ts)
    return ts, env_lo, env_hi


def growth_bound(ts: np.ndarray, c: float, theta: float) -> np.ndarray:
    """c (1 + |t|^theta); the power term vanishes at t = 0 for every theta."""
    mag = np.abs(np.asarray(ts, dtype=float))
    with np.errstate(divide="ignore"):
        power = np.where(mag == 0, 0.0, mag**theta)
    return c * (1.0 + power)


def check_growth(
    g: PiecewiseGraph,
    params: GrowthParams,
    interval: Interval = HYPOTHESIS_RANGE,
    n: int = HYPOTHESIS_SAMPLES,
) -> GrowthReport:
    """Sampled |gamma(t)| <= c (1 + |t|^theta), one-sided limits included."""
    ts, env_lo, env_hi = _sample_points(g, interval, n)
    magnitude = np.maximum(np.abs(env_lo), np.abs(env_hi))
    ratios = magnitude / growth_bound(ts, params.c, params.theta)
    k = int(np.argmax(ratios))
    report = GrowthReport(ok=bool(ratios[k] <= 1.0), worst_ratio=float(ratios[k]), worst_t=float(ts[k]))
    if not report.ok:
        logger.warning(
            "Growth condition fails for %r: ratio %.6g at t=%.6g", g.source, report.worst_ratio, report.worst_t
        )
    return report


def check_sign_condition(
    g: PiecewiseGraph,
    d: float,
    interval: Interval = HYPOTHESIS_RANGE,
    n: int = HYPOTHESIS_SAMPLES,
) -> SignConditionReport:
    """Sampled phi°(t; -t) <= d (1 + |t|)."""
    if d < 0:
        raise DomainError(f"sign constant d must be nonnegative, got {d}")
    ts, env_lo, env_hi = _sample_points(g, interval, n)
    direction = -ts
    value = np.where(direction > 0, direction * env_hi, np.where(direction < 0, direction * env_lo, 0.0))
    excess = value - d * (1.0 + np.abs(ts))
    k = int(np.argmax(excess))
    return SignConditionReport(ok=bool(excess[k] <= 0.0), worst_excess=float(excess[k]), worst_t=float(ts[k]))


def check_gradient_growth(
    g1: PiecewiseGraph,
    g2: PiecewiseGraph,
    c: float,
    interval: Interval = HYPOTHESIS_RANGE,
    n: int = 201,
) -> GrowthReport:
    """|(nu1, nu2)| <= c (1 + |(t, s)|) for nu_k in the envelopes, on an n x n grid."""
    if not c > 0:
        raise DomainError(f"gradient growth constant must be positive, got {c}")
    t1, lo1, hi1 = _sample_points(g1, interval, n)
    t2, lo2, hi2 = _sample_points(g2, interval, n)
    m1 = np.maximum(np.abs(lo1), np.abs(hi1))
    m2 = np.maximum(np.abs(lo2), np.abs(hi2))
    norm = np.hypot(m1[:, None], m2[None, :])
    bound = c * (1.0 + np.hypot(t1[:, None], t2[None, :]))
    ratios = norm / bound
    i, j = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
    worst = float(ratios[i, j])
    return GrowthReport(
        ok=worst <= 1.0,
        worst_ratio=worst,
        worst_t=float(np.hypot(t1[i], t2[j])),
        hypothesis="H(phi) gradient growth",
    )


def check_rauch_condition(
    g: PiecewiseGraph,
    interval: Interval = HYPOTHESIS_RANGE,
    n: int = HYPOTHESIS_SAMPLES,
) -> RauchReport:
    """Smallest sampled R with sup_{t <= -R} gamma <= 0 <= inf_{t >= R} gamma.

    Only the part of the real line inside ``interval`` is sampled; radius is
    +inf when no R in range works.
    """
    ts, env_lo, env_hi = _sample_points(g, interval, n)
    # suffix min of lower envelope from the right, prefix max of upper from the left
    inf_right = np.minimum.accumulate(env_lo[::-1])[::-1]
    sup_left = np.maximum.accumulate(env_hi)
    for radius in np.unique(np.abs(ts)):
        right = ts >= radius
        left = ts <= -radius
        ok_right = not right.any() or inf_right[np.argmax(right)] >= 0.0
        ok_left = not left.any() or sup_left[np.flatnonzero(left)[-1]] <= 0.0
        if ok_right and ok_left and right.any() and left.any():
            return RauchReport(ok=True, radius=float(radius))
    return RauchReport(ok=False, radius=float("inf"))
