"""Distance of the recovered reactions to the Chang envelope of the graphs."""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np

from wentzell.constants import INCLUSION_FACTOR, INCLUSION_FLOOR
from wentzell.graphlib.graph import PiecewiseGraph, window_jump, window_lipschitz, windowed_envelope
from wentzell.models import InclusionReport, Trajectory

logger = logging.getLogger(__name__)

ToleranceFn = Callable[[float, np.ndarray, np.ndarray], np.ndarray]


def default_tolerance(
    eps: float, jump: np.ndarray, lipschitz: np.ndarray, factor: float = INCLUSION_FACTOR
) -> np.ndarray:
    """eps (factor J + L) + 1e-8 from the local jump J and slope L over the window."""
    return eps * (factor * jump + lipschitz) + INCLUSION_FLOOR


def _distance(xi: np.ndarray, lo: np.ndarray, hi: np.ndarray, widen: float) -> np.ndarray:
    return np.maximum(np.maximum((lo - widen) - xi, xi - (hi + widen)), 0.0)


def inclusion_check(
    traj: Trajectory,
    gamma1: PiecewiseGraph,
    gamma2: PiecewiseGraph,
    eps: float,
    tol_fn: ToleranceFn | None = None,
    *,
    widen: float = 0.0,
) -> InclusionReport:
    """dist(xi_k, envelope of gamma_k) at every (time, node) pair.

    The primary figures measure against the envelope filled over the
    mollification window [u - eps, u + eps]; the ``pointwise_*`` figures
    against the Chang envelope at u itself.  ``widen`` enlarges every
    envelope by that amount on both sides.
    """
    tol_fn = default_tolerance if tol_fn is None else tol_fn
    bv = traj.boundary_vertices
    n_rows, n_nodes = traj.states.shape
    blocks = [
        (gamma1, traj.states, traj.reaction_omega, np.arange(n_nodes)),
        (gamma2, traj.traces, traj.reaction_gamma, bv),
    ]
    windowed, pointwise, passes, pointwise_passes, nodes, steps = [], [], [], [], [], []
    for graph, u, xi, node_ids in blocks:
        flat_u = u.ravel()
        flat_xi = xi.ravel()
        lo, hi = windowed_envelope(graph, flat_u, eps)
        plo, phi = graph.envelope_many(flat_u)
        tol = tol_fn(eps, window_jump(graph, flat_u, eps), window_lipschitz(graph, flat_u, eps))
        d_win = _distance(flat_xi, lo, hi, widen)
        d_pt = _distance(flat_xi, plo, phi, widen)
        windowed.append(d_win)
        pointwise.append(d_pt)
        passes.append(d_win <= tol)
        pointwise_passes.append(d_pt <= tol)
        nodes.append(np.tile(node_ids, n_rows))
        steps.append(np.repeat(np.arange(n_rows), len(node_ids)))

    d_all = np.concatenate(windowed)
    d_pt_all = np.concatenate(pointwise)
    ok_all = np.concatenate(passes)
    k = int(np.argmax(d_all))
    report = InclusionReport(
        fraction_inside=float(ok_all.mean()),
        worst_distance=float(d_all[k]),
        worst_step=int(np.concatenate(steps)[k]),
        worst_node=int(np.concatenate(nodes)[k]),
        pointwise_fraction=float(np.concatenate(pointwise_passes).mean()),
        pointwise_worst=float(d_pt_all.max()),
        n_checked=int(d_all.size),
    )
    logger.info(
        "Inclusion: %.4f inside (pointwise %.4f), worst distance %.3e",
        report.fraction_inside,
        report.pointwise_fraction,
        report.worst_distance,
    )
    return report
