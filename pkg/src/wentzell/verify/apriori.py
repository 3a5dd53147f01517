"""Observed a priori constant C in |U|_W <= C (1 + |U0|_H + |f|) and its stability across levels."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from wentzell.constants import APRIORI_MAX_RATIO
from wentzell.models import AprioriReport, AprioriStudyVerdict, EnergyLedger


def apriori_check(
    ledger: EnergyLedger,
    U0_norm: float | None = None,
    f_dual_norm: float | None = None,
) -> AprioriReport:
    """C_observed = (|U|_{L2(0,T;V)} + |U'|_{L2(0,T;V*)}) / (1 + |U0|_H + |f|_{L2(0,T;V*)}).

    The norms of U0 and f default to the ones recorded in the ledger.
    """
    dt = ledger.dt[1:]
    v_norm = math.sqrt(float(np.sum(dt * ledger.v_norm_sq[1:])))
    derivative_norm = math.sqrt(float(np.sum(dt * ledger.derivative_dual_norm[1:] ** 2)))
    if U0_norm is None:
        U0_norm = math.sqrt(max(float(ledger.h_norm_sq[0]), 0.0))
    if f_dual_norm is None:
        f_dual_norm = math.sqrt(float(np.sum(dt * ledger.load_dual_norm[1:] ** 2)))
    c_observed = (v_norm + derivative_norm) / (1.0 + U0_norm + f_dual_norm)
    return AprioriReport(
        c_observed=c_observed,
        v_norm=v_norm,
        derivative_norm=derivative_norm,
        u0_norm=U0_norm,
        f_norm=f_dual_norm,
    )


def apriori_study_verdict(
    reports: Sequence[AprioriReport],
    max_ratio: float = APRIORI_MAX_RATIO,
) -> AprioriStudyVerdict:
    """max/min of C_observed over levels must stay within ``max_ratio``; all-zero passes."""
    constants = tuple(r.c_observed for r in reports)
    if not constants or max(constants) == 0.0:
        return AprioriStudyVerdict(ok=True, ratio=1.0, constants=constants)
    smallest = min(constants)
    ratio = max(constants) / smallest if smallest > 0 else math.inf
    return AprioriStudyVerdict(ok=ratio <= max_ratio, ratio=ratio, constants=constants)
