"""Discrete energy inequality, coercivity certificate and the closed-form a priori bound.

Stepwise, for every n >= 1:

    1/2 |U^n|^2 - 1/2 |U^{n-1}|^2 + dt M/2 |U^n|_V^2 + dt <N(U^n), U^n>
        <= dt |F^n|_*^2 / (2M) + rho^n

and its sum over steps 1..n.  Violations are reported relative to the
magnitude of the terms involved.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy import optimize

from wentzell.constants import ENERGY_TOL
from wentzell.models import (
    AprioriBound,
    EnergyLedger,
    EnergyReport,
    ReactionGrowthReport,
    Trajectory,
)

logger = logging.getLogger(__name__)

_TINY = 1e-300
# Upper end of the bracket search for the a priori root.
SEARCH_LIMIT = 1e300


def _relative(excess: np.ndarray, scale: np.ndarray) -> np.ndarray:
    return np.where(scale > _TINY, excess / np.maximum(scale, _TINY), np.sign(excess) * np.abs(excess))


def energy_check(traj: Trajectory, ledger: EnergyLedger, tol: float = ENERGY_TOL) -> EnergyReport:
    """Check the stepwise and integrated energy inequalities plus the coercivity certificate.

    ``worst_violation`` is the largest relative excess over all three
    families; it is positive exactly when some inequality fails beyond
    round-off.
    """
    M = ledger.coercivity
    h = ledger.h_norm_sq
    v = ledger.v_norm_sq
    dt = ledger.dt
    pairing = ledger.reaction_omega + ledger.reaction_gamma
    F2 = ledger.load_dual_norm**2

    lhs_terms = 0.5 * h[1:] - 0.5 * h[:-1] + dt[1:] * (0.5 * M * v[1:] + pairing[1:])
    rhs_terms = dt[1:] * F2[1:] / (2.0 * M) + ledger.rho[1:]
    step_scale = (
        0.5 * h[1:] + 0.5 * h[:-1] + dt[1:] * (0.5 * M * v[1:] + np.abs(pairing[1:])) + rhs_terms
    )
    step_violation = _relative(lhs_terms - rhs_terms, step_scale)
    step_pass = tuple(bool(s <= tol) for s in step_violation)

    # <(K+R)U, U> >= M |U|_V^2
    coercive_gap = _relative(M * v - ledger.operator_energy, M * v + np.abs(ledger.operator_energy))
    coercivity_ok = bool(np.all(coercive_gap <= tol))

    cum_lhs = 0.5 * h[1:] + np.cumsum(dt[1:] * (0.5 * M * v[1:] + pairing[1:]))
    cum_rhs = 0.5 * h[0] + np.cumsum(rhs_terms)
    cum_scale = 0.5 * h[1:] + np.cumsum(dt[1:] * (0.5 * M * v[1:] + np.abs(pairing[1:]))) + cum_rhs
    integrated_violation = _relative(cum_lhs - cum_rhs, cum_scale)
    integrated_ok = bool(np.all(integrated_violation <= tol))

    families = [
        (step_violation, 1),
        (coercive_gap, 0),
        (integrated_violation, 1),
    ]
    worst, worst_step = -math.inf, 0
    for values, offset in families:
        if values.size:
            k = int(np.argmax(values))
            if values[k] > worst:
                worst, worst_step = float(values[k]), k + offset
    worst_coercivity_gap = float(coercive_gap.max()) if coercive_gap.size else 0.0

    bound = apriori_bound(ledger) if ledger.has_growth else None
    growth = reaction_growth_check(ledger) if ledger.has_growth else None
    ok = all(step_pass) and coercivity_ok and integrated_ok
    if bound is not None:
        ok = ok and bound.ok
    if growth is not None:
        ok = ok and growth.ok
    report = EnergyReport(
        ok=ok,
        step_pass=step_pass,
        worst_violation=worst if math.isfinite(worst) else 0.0,
        worst_step=worst_step,
        coercivity_ok=coercivity_ok,
        worst_coercivity_gap=worst_coercivity_gap,
        integrated_ok=integrated_ok,
        worst_integrated_violation=float(integrated_violation.max()) if integrated_violation.size else 0.0,
        bound=bound,
        reaction_growth=growth,
    )
    level = logging.INFO if report.ok else logging.WARNING
    logger.log(level, "Energy check: ok=%s worst=%.3e at step %d", report.ok, report.worst_violation, worst_step)
    return report


# ---------------------------------------------------------------------------
# A priori bound
# ---------------------------------------------------------------------------


def _observed_x(ledger: EnergyLedger) -> float:
    """Discrete L2(0,T;V) norm of the trajectory."""
    return math.sqrt(float(np.sum(ledger.dt[1:] * ledger.v_norm_sq[1:])))


def _budget(ledger: EnergyLedger) -> float:
    M = ledger.coercivity
    return float(
        0.5 * ledger.h_norm_sq[0]
        + np.sum(ledger.dt[1:] * ledger.load_dual_norm[1:] ** 2) / (2.0 * M)
        + np.sum(ledger.rho[1:])
    )


def _reaction_polynomial(ledger: EnergyLedger) -> tuple[list[tuple[float, float]], float]:
    """Terms (coefficient, power) of P(X), plus the budget B."""
    consts = ledger.constants()
    assert ledger.growth1 is not None and ledger.growth2 is not None
    terms = []
    for a, ap, kappa, theta in (
        (consts.a1, consts.a1p, ledger.kappa_omega, ledger.growth1.theta),
        (consts.a2, consts.a2p, ledger.kappa_gamma, ledger.growth2.theta),
    ):
        terms.append((a * kappa, 1.0))
        terms.append((ap * kappa ** (1.0 + theta), 1.0 + theta))
    return terms, _budget(ledger)


def apriori_bound(ledger: EnergyLedger) -> AprioriBound | None:
    """Largest root X* of (M/2) X^2 - P(X) - B and the state bound 2 (B + P(X*)).

    ``x_star`` is +inf when the quadratic term does not dominate.  None when
    the ledger carries no growth constants.
    """
    if not ledger.has_growth:
        return None
    M = ledger.coercivity
    terms, B = _reaction_polynomial(ledger)

    def P(X: float) -> float:
        with np.errstate(over="ignore"):
            return float(sum(coef * np.power(np.float64(X), power) for coef, power in terms))

    def scaled(X: float) -> float:
        # (M/2) - (P(X) + B) / X^2, increasing in X for powers <= 2
        with np.errstate(over="ignore", under="ignore"):
            lower = sum(coef * np.power(np.float64(X), power - 2.0) for coef, power in terms)
            return float(0.5 * M - lower - B / np.float64(X) ** 2)

    leading = sum(coef for coef, power in terms if power >= 2.0)
    lo = 1e-12
    if leading >= 0.5 * M:
        x_star = math.inf
    elif scaled(lo) >= 0:
        x_star = 0.0
    else:
        hi = 1.0
        while scaled(hi) < 0 and hi < SEARCH_LIMIT:
            hi *= 2.0
        x_star = optimize.brentq(scaled, lo, hi, xtol=1e-14, rtol=1e-12) if scaled(hi) >= 0 else math.inf

    state_bound_sq = 2.0 * (B + P(x_star)) if math.isfinite(x_star) else math.inf
    observed_x = _observed_x(ledger)
    observed_max = float(ledger.h_norm_sq.max())
    slack = 1.0 + 1e-9
    ok = observed_x <= x_star * slack + 1e-12 and observed_max <= state_bound_sq * slack + 1e-12
    return AprioriBound(
        x_star=float(x_star),
        state_bound_sq=float(state_bound_sq),
        observed_x=observed_x,
        observed_max_state_sq=observed_max,
        ok=bool(ok),
    )


def reaction_growth_check(ledger: EnergyLedger) -> ReactionGrowthReport | None:
    """|xi_k|_{L2(0,T;L2)} <= a_k + a_k' (kappa_k X)^theta_k with X the observed L2(0,T;V) norm."""
    if ledger.growth1 is None or ledger.growth2 is None:
        return None
    consts = ledger.constants()
    X = _observed_x(ledger)
    dt = ledger.dt[1:]
    omega_norm = math.sqrt(float(np.sum(dt * ledger.xi_omega_norm_sq[1:])))
    gamma_norm = math.sqrt(float(np.sum(dt * ledger.xi_gamma_norm_sq[1:])))
    omega_bound = consts.a1 + consts.a1p * (ledger.kappa_omega * X) ** ledger.growth1.theta
    gamma_bound = consts.a2 + consts.a2p * (ledger.kappa_gamma * X) ** ledger.growth2.theta
    slack = 1.0 + 1e-9
    return ReactionGrowthReport(
        ok=bool(omega_norm <= omega_bound * slack and gamma_norm <= gamma_bound * slack),
        omega_norm=omega_norm,
        omega_bound=float(omega_bound),
        gamma_norm=gamma_norm,
        gamma_bound=float(gamma_bound),
    )
