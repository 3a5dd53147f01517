"""Backward Euler step with Newton on the mollified reaction, loads and initial projection."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from wentzell.constants import LINE_SEARCH_MAX_HALVINGS
from wentzell.errors import DomainError, NewtonConvergenceError, SolverError
from wentzell.fem.assembly import AssembledOperators, boundary_quadrature, interior_quadrature
from wentzell.solver.nemytskii import assemble_reaction, reaction_jacobian, reactions
from wentzell.solver.problem import SolveConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StepResult:
    """One accepted backward Euler step.

    ``residual`` is the final Newton residual vector G(U); ``residual_norm``
    its lumped H-norm.
    """

    time: float
    dt: float
    state: np.ndarray
    reaction_omega: np.ndarray
    reaction_gamma: np.ndarray
    load: np.ndarray
    iterations: int
    residual: np.ndarray
    residual_norm: float


# ---------------------------------------------------------------------------
# Loads and initial datum
# ---------------------------------------------------------------------------


def load_vector(ops: AssembledOperators, config: SolveConfig, time: float) -> np.ndarray:
    """F = M_omega I(f1) + boundary integral of f2 against each hat function."""
    mesh = ops.mesh
    F = ops.mass_omega @ config.f1(time, mesh.vertices) if not config.f1.is_zero else np.zeros(ops.size)
    if not config.f2.is_zero:
        points, weights, basis, facet_index = boundary_quadrature(mesh, 3)
        values = config.f2(time, points, mesh.facet_normals[facet_index])
        np.add.at(F, mesh.facets[facet_index], (weights * values)[:, None] * basis)
    if not np.all(np.isfinite(F)):
        raise SolverError(f"load vector is not finite at t={time:.6g}")
    return np.asarray(F, dtype=float)


def project_initial(ops: AssembledOperators, config: SolveConfig) -> np.ndarray:
    """Nodal interpolation of u0, or its H-orthogonal projection when configured."""
    mesh = ops.mesh
    values = config.u0(0.0, mesh.vertices)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"initial datum is not finite at vertex {i} ({mesh.vertices[i].tolist()})")
    if config.initial_projection == "interpolation":
        return np.asarray(values, dtype=float)

    points, weights, basis, cell_index = interior_quadrature(mesh, 4)
    b = np.zeros(ops.size)
    np.add.at(b, mesh.cells[cell_index], (weights * config.u0(0.0, points))[:, None] * basis)
    points, weights, basis, facet_index = boundary_quadrature(mesh, 4)
    np.add.at(b, mesh.facets[facet_index], (weights * config.u0(0.0, points))[:, None] * basis)
    if not np.all(np.isfinite(b)):
        raise DomainError("initial datum is not finite at a quadrature point")
    return np.asarray(splinalg.spsolve(ops.mass_h.tocsc(), b), dtype=float)


# ---------------------------------------------------------------------------
# Step
# ---------------------------------------------------------------------------


def residual_norm(ops: AssembledOperators, G: np.ndarray) -> float:
    """Lumped H-norm of a residual load: sqrt(sum G_i^2 / L_i)."""
    return math.sqrt(float(np.sum(G**2 / ops.lumped_h)))


def step(
    ops: AssembledOperators,
    config: SolveConfig,
    U_prev: np.ndarray,
    t_next: float,
    dt: float | None = None,
    *,
    damped: bool = False,
) -> StepResult:
    """Solve M_H (U - U_prev)/dt + (K+R) U + N_eps(U) = F(t_next) by Newton.

    Converged when the lumped H-norm of the residual is at most
    ``newton_tol * (1 + |M_H U_prev/dt| + |F|)``.  ``damped`` turns on a
    backtracking line search.
    """
    dt = config.step_size if dt is None else dt
    u_prev = np.asarray(U_prev, dtype=float)
    if not np.all(np.isfinite(u_prev)):
        raise SolverError(f"previous state is not finite before t={t_next:.6g}")
    load = load_vector(ops, config, t_next)
    mass = ops.mass_h
    A = ops.operator
    scale = 1.0 + residual_norm(ops, mass @ u_prev / dt) + residual_norm(ops, load)
    target = config.newton_tol * scale
    base = (mass / dt + A).tocsr()

    def residual(U: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        xi1, xi2 = reactions(ops, config, U)
        G = mass @ (U - u_prev) / dt + A @ U + assemble_reaction(ops, xi1, xi2) - load
        return G, xi1, xi2

    U = u_prev.copy()
    G, xi1, xi2 = residual(U)
    norm = residual_norm(ops, G)
    for iteration in range(config.newton_max_iter + 1):
        logger.debug("Newton t=%.6g it=%d residual=%.3e target=%.3e", t_next, iteration, norm, target)
        if not math.isfinite(norm):
            break
        if norm <= target:
            return StepResult(t_next, dt, U, xi1, xi2, load, iteration, G, norm)
        if iteration == config.newton_max_iter:
            break
        J = base + sparse.diags(reaction_jacobian(ops, config, U))
        delta = np.asarray(splinalg.spsolve(J.tocsc(), -G), dtype=float)
        alpha = 1.0
        trial = U + delta
        G_t, xi1_t, xi2_t = residual(trial)
        norm_t = residual_norm(ops, G_t)
        if damped:
            halvings = 0
            while not (norm_t < (1.0 - 1e-4 * alpha) * norm) and halvings < LINE_SEARCH_MAX_HALVINGS:
                alpha *= 0.5
                halvings += 1
                trial = U + alpha * delta
                G_t, xi1_t, xi2_t = residual(trial)
                norm_t = residual_norm(ops, G_t)
        U, G, xi1, xi2, norm = trial, G_t, xi1_t, xi2_t, norm_t

    raise NewtonConvergenceError(
        f"Newton did not converge at t={t_next:.6g} (dt={dt:.3g}): residual {norm:.3e} > {target:.3e}",
        time=t_next,
        dt=dt,
        iterations=config.newton_max_iter,
        residual=norm,
    )
