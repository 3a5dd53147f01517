"""Residual of the discrete hemivariational inequality along a trajectory.

For step n and test function V, with W = V - U^n:

    <M_H (U^n - U^{n-1})/dt + (K+R) U^n - F^n, W>
        + sum_i L_omega,i phi1°(u_i; w_i) + sum_{i on boundary} L_gamma,i phi2°(u_i; w_i)

should be nonnegative up to a tolerance of order eps + h + dt.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence

import numpy as np

from wentzell.constants import HVI_FACTOR, HVI_TEST_FUNCTIONS
from wentzell.fem.assembly import AssembledOperators
from wentzell.graphlib.graph import PiecewiseGraph
from wentzell.models import HviReport, Trajectory

logger = logging.getLogger(__name__)

TestFunction = np.ndarray | Callable[[np.ndarray], np.ndarray]


def _clarke_sum(g: PiecewiseGraph, weights: np.ndarray, u: np.ndarray, W: np.ndarray) -> np.ndarray:
    """sum_i weights_i phi°(u_i; W_ik) for every column k."""
    lo, hi = g.envelope_many(u)
    dd = np.where(W > 0, W * hi[:, None], np.where(W < 0, W * lo[:, None], 0.0))
    return weights @ dd


def direction_battery(
    ops: AssembledOperators,
    U: np.ndarray,
    rng: np.random.Generator,
    count: int = HVI_TEST_FUNCTIONS,
) -> np.ndarray:
    """Directions W = V - U for a seeded battery of test functions V, as columns.

    A third are nodal bumps U +- alpha e_i, a third interpolated
    low-frequency sinusoids, the rest U + s z with Gaussian z.
    """
    n = ops.size
    n_bumps = count // 3
    n_waves = count // 3
    n_random = count - n_bumps - n_waves
    amplitude = 1.0 + float(np.abs(U).max(initial=0.0))
    W = np.zeros((n, count))

    nodes = rng.integers(0, n, size=n_bumps)
    signs = rng.choice([-1.0, 1.0], size=n_bumps)
    W[nodes, np.arange(n_bumps)] = signs * amplitude

    pts = ops.mesh.vertices
    lo = pts.min(axis=0)
    span = np.where(pts.max(axis=0) > lo, pts.max(axis=0) - lo, 1.0)
    ref = (pts - lo) / span
    for j in range(n_waves):
        k = rng.integers(1, 4, size=ref.shape[1])
        phase = rng.uniform(0.0, 2.0 * np.pi)
        wave = np.sin(np.pi * k[0] * ref[:, 0] + phase)
        if ref.shape[1] > 1:
            wave = wave * np.cos(np.pi * k[1] * ref[:, 1])
        W[:, n_bumps + j] = amplitude * wave - U

    W[:, n_bumps + n_waves :] = 0.5 * amplitude * rng.standard_normal((n, n_random))
    return W


def hvi_residual(
    traj: Trajectory,
    ops: AssembledOperators,
    gamma1: PiecewiseGraph,
    gamma2: PiecewiseGraph,
    test_fns: Sequence[TestFunction] | None = None,
    *,
    seed: int = 0,
    n_tests: int = HVI_TEST_FUNCTIONS,
    factor: float = HVI_FACTOR,
) -> HviReport:
    """Smallest residual over all steps and test functions.

    Passes when every residual is at least
    ``-factor (eps + h + dt) (1 + sum_i (L_omega + L_gamma)_i |w_i|)``.
    Without ``test_fns`` a seeded battery is drawn per step.  The zero
    direction V = U^n is always evaluated and reported separately.
    """
    rng = np.random.default_rng(seed)
    bv = traj.boundary_vertices
    L_omega = ops.lumped_omega
    L_gamma = ops.lumped_gamma[bv]
    weights = ops.lumped_h
    h = ops.mesh.size
    fixed = None
    if test_fns is not None:
        fixed = np.column_stack(
            [np.asarray(v(ops.mesh.vertices) if callable(v) else v, dtype=float) for v in test_fns]
        )

    best, best_tol, best_step = np.inf, 0.0, 0
    ok = True
    zero_max = 0.0
    n_evaluated = 0
    for n in range(1, traj.n_steps + 1):
        U = traj.states[n]
        dt = traj.times[n] - traj.times[n - 1]
        base = ops.mass_h @ (U - traj.states[n - 1]) / dt + ops.operator @ U - traj.loads[n]
        W = fixed - U[:, None] if fixed is not None else direction_battery(ops, U, rng, n_tests)
        W = np.column_stack([np.zeros(ops.size), W])
        residual = (
            base @ W + _clarke_sum(gamma1, L_omega, U, W) + _clarke_sum(gamma2, L_gamma, U[bv], W[bv])
        )
        zero_max = max(zero_max, abs(float(residual[0])))
        tol = factor * (traj.eps + h + dt) * (1.0 + weights @ np.abs(W))
        ok = ok and bool(np.all(residual >= -tol))
        k = int(np.argmin(residual))
        if residual[k] < best:
            best, best_tol, best_step = float(residual[k]), float(tol[k]), n
        n_evaluated += W.shape[1]

    if not np.isfinite(best):
        best = 0.0
    report = HviReport(
        ok=ok,
        min_residual=best,
        tolerance=best_tol,
        worst_step=best_step,
        zero_direction_max=zero_max,
        n_tests=n_evaluated,
    )
    logger.info("HVI residual: min %.3e (tol %.3e) at step %d, ok=%s", best, best_tol, best_step, ok)
    return report
