"""Mass-lumped nodal reaction term N_eps(U) and its diagonal Jacobian."""

from __future__ import annotations

import numpy as np

from wentzell.fem.assembly import AssembledOperators
from wentzell.graphlib.mollifier import mollify_derivative_many, mollify_many
from wentzell.solver.problem import SolveConfig


def reactions(ops: AssembledOperators, config: SolveConfig, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nodal xi1 = gamma1_eps(U) on all vertices and xi2 = gamma2_eps(U) on boundary vertices."""
    bv = ops.mesh.boundary_vertices
    xi1 = mollify_many(config.gamma1, config.kernel, config.eps, U)
    xi2 = mollify_many(config.gamma2, config.kernel, config.eps, U[bv])
    return xi1, xi2


def assemble_reaction(ops: AssembledOperators, xi1: np.ndarray, xi2: np.ndarray) -> np.ndarray:
    bv = ops.mesh.boundary_vertices
    out = ops.lumped_omega * xi1
    out[bv] += ops.lumped_gamma[bv] * xi2
    return out


def nemytskii(ops: AssembledOperators, config: SolveConfig, U: np.ndarray) -> np.ndarray:
    """L_omega gamma1_eps(U) + L_gamma gamma2_eps(U on the boundary)."""
    xi1, xi2 = reactions(ops, config, np.asarray(U, dtype=float))
    return assemble_reaction(ops, xi1, xi2)


def reaction_jacobian(ops: AssembledOperators, config: SolveConfig, U: np.ndarray) -> np.ndarray:
    """Diagonal of dN_eps/dU."""
    u = np.asarray(U, dtype=float)
    bv = ops.mesh.boundary_vertices
    d1 = mollify_derivative_many(config.gamma1, config.kernel, config.eps, u)
    d2 = mollify_derivative_many(config.gamma2, config.kernel, config.eps, u[bv])
    return assemble_reaction(ops, d1, d2)
