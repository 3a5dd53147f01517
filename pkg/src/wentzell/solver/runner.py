"""Time loop: backward Euler over [0, T] with a retry policy, plus the energy ledger."""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy import sparse
from tenacity import RetryCallState, Retrying, retry_if_exception_type, stop_after_attempt

from wentzell.errors import NewtonConvergenceError
from wentzell.fem.assembly import AssembledOperators
from wentzell.fem.coercivity import estimate_coercivity, estimate_lumped_embedding
from wentzell.models import EnergyLedger, SmallnessVerdict, Trajectory
from wentzell.solver.nemytskii import reactions
from wentzell.solver.problem import SolveConfig
from wentzell.solver.stepper import StepResult, load_vector, project_initial, step
from wentzell.verify.smallness import smallness_check

logger = logging.getLogger(__name__)


def _log_retry(state: RetryCallState) -> None:
    exc = state.outcome.exception() if state.outcome else None
    logger.warning("Step failed (%s); retrying as two damped half steps", exc)


def advance(
    ops: AssembledOperators,
    config: SolveConfig,
    U_prev: np.ndarray,
    t_prev: float,
    dt: float,
) -> list[StepResult]:
    """One step of size dt; on Newton failure, once more as two damped half steps."""
    retrying = Retrying(
        stop=stop_after_attempt(2),
        retry=retry_if_exception_type(NewtonConvergenceError),
        before_sleep=_log_retry,
        reraise=True,
    )
    for attempt in retrying:
        with attempt:
            if attempt.retry_state.attempt_number == 1:
                return [step(ops, config, U_prev, t_prev + dt, dt)]
            half = 0.5 * dt
            first = step(ops, config, U_prev, t_prev + half, half, damped=True)
            second = step(ops, config, first.state, t_prev + dt, half, damped=True)
            return [first, second]
    raise AssertionError("unreachable")


def smallness_verdict(ops: AssembledOperators, config: SolveConfig) -> SmallnessVerdict | None:
    if config.growth1 is None or config.growth2 is None:
        return None
    return smallness_check(
        config.growth1.theta,
        config.growth2.theta,
        config.growth1.c,
        config.growth2.c,
        ops.require_coercivity,
    )


def solve(config: SolveConfig, ops: AssembledOperators | None = None) -> tuple[Trajectory, EnergyLedger]:
    """Integrate from the projected initial datum to T and build the energy ledger.

    ``ops`` are assembled from ``config`` when not given; the coercivity
    constant is estimated if they carry none.
    """
    if ops is None:
        ops = config.assemble()
    elif ops.coercivity is None:
        ops = ops.with_coercivity(estimate_coercivity(ops))
    verdict = smallness_verdict(ops, config)
    if verdict is not None and not verdict.ok:
        logger.warning("Smallness condition fails: case %s, margin %.6g", verdict.case, verdict.margin)

    U0 = project_initial(ops, config)
    xi1, xi2 = reactions(ops, config, U0)
    results = [
        StepResult(0.0, 0.0, U0, xi1, xi2, load_vector(ops, config, 0.0), 0, np.zeros(ops.size), 0.0)
    ]
    dt = config.step_size
    for n in range(config.n_steps):
        t_prev = results[-1].time
        t_next = config.T if n == config.n_steps - 1 else (n + 1) * dt
        results.extend(advance(ops, config, results[-1].state, t_prev, t_next - t_prev))

    traj = Trajectory(
        times=np.array([r.time for r in results]),
        states=np.vstack([r.state for r in results]),
        reaction_omega=np.vstack([r.reaction_omega for r in results]),
        reaction_gamma=np.vstack([r.reaction_gamma for r in results]),
        loads=np.vstack([r.load for r in results]),
        boundary_vertices=ops.mesh.boundary_vertices,
        newton_iterations=np.array([r.iterations for r in results]),
        newton_residuals=np.array([r.residual_norm for r in results]),
        eps=config.eps,
        mesh_size=ops.mesh.size,
    )
    rho = np.array([r.dt * abs(float(r.residual @ r.state)) for r in results])
    ledger = build_ledger(ops, config, traj, rho, verdict)
    logger.info(
        "Solved %d steps on %d dofs (eps=%.3g, max Newton iterations %d)",
        traj.n_steps,
        ops.size,
        config.eps,
        int(traj.newton_iterations.max()),
    )
    return traj, ledger


def build_ledger(
    ops: AssembledOperators,
    config: SolveConfig,
    traj: Trajectory,
    rho: np.ndarray,
    verdict: SmallnessVerdict | None = None,
) -> EnergyLedger:
    """Per-step energy terms of ``traj`` on ``ops``."""
    S = traj.states
    bv = traj.boundary_vertices
    dt = traj.dt

    def quad(matrix: sparse.csr_matrix, X: np.ndarray) -> np.ndarray:
        return np.einsum("ij,ij->i", X, (matrix @ X.T).T)

    def dual_sq(X: np.ndarray) -> np.ndarray:
        Z = ops.gram_factor.solve(np.ascontiguousarray(X.T))
        return np.maximum(np.einsum("ij,ji->i", X, Z), 0.0)

    derivative = np.zeros_like(S)
    if traj.n_steps:
        derivative[1:] = (ops.mass_h @ np.diff(S, axis=0).T).T / dt[1:, None]

    error_h = np.full(len(traj.times), math.nan)
    if config.exact is not None:
        exact = np.vstack([config.exact(tn, ops.mesh.vertices) for tn in traj.times])
        error_h = np.sqrt(np.maximum(quad(ops.mass_h, S - exact), 0.0))

    kappa_omega, kappa_gamma = estimate_lumped_embedding(ops)
    return EnergyLedger(
        times=traj.times,
        dt=dt,
        h_norm_sq=quad(ops.mass_h, S),
        v_norm_sq=quad(ops.gram, S),
        operator_energy=quad(ops.operator, S),
        load_dual_norm=np.sqrt(dual_sq(traj.loads)),
        reaction_omega=(traj.reaction_omega * S) @ ops.lumped_omega,
        reaction_gamma=(traj.reaction_gamma * S[:, bv]) @ ops.lumped_gamma[bv],
        rho=rho,
        newton_iterations=traj.newton_iterations,
        newton_residual=traj.newton_residuals,
        derivative_dual_norm=np.sqrt(dual_sq(derivative)),
        xi_omega_norm_sq=traj.reaction_omega**2 @ ops.lumped_omega,
        xi_gamma_norm_sq=traj.reaction_gamma**2 @ ops.lumped_gamma[bv],
        error_h=error_h,
        coercivity=ops.require_coercivity,
        kappa_omega=kappa_omega,
        kappa_gamma=kappa_gamma,
        measure_omega=ops.measure_omega,
        measure_gamma=ops.measure_gamma,
        eps=config.eps,
        growth1=config.growth1,
        growth2=config.growth2,
        smallness=verdict,
    )
