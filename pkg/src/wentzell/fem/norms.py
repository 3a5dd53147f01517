"""Inner products and norms of the product spaces on assembled operators."""

from __future__ import annotations

import math
from collections.abc import Callable

import numpy as np

from wentzell.errors import DomainError
from wentzell.fem.assembly import AssembledOperators, interior_quadrature


def _vector(ops: AssembledOperators, values: np.ndarray, name: str) -> np.ndarray:
    vec = np.asarray(values, dtype=float)
    if vec.shape[0] != ops.size:
        raise DomainError(f"{name} has length {vec.shape[0]}, expected {ops.size}")
    return vec


def product_inner(ops: AssembledOperators, U: np.ndarray, V: np.ndarray) -> float:
    """<U, V> in L2(omega) x L2(gamma): U^T (M_omega + M_gamma) V."""
    u = _vector(ops, U, "U")
    v = _vector(ops, V, "V")
    return float(u @ (ops.mass_h @ v))


def h_norm(ops: AssembledOperators, U: np.ndarray) -> float:
    return math.sqrt(max(product_inner(ops, U, U), 0.0))


def v_norm(ops: AssembledOperators, U: np.ndarray) -> float:
    """sqrt(U^T G_V U): the Hilbertian norm of the energy space."""
    u = _vector(ops, U, "U")
    return math.sqrt(max(float(u @ (ops.gram @ u)), 0.0))


def riesz_dual_norm(ops: AssembledOperators, F: np.ndarray) -> float:
    """sqrt(F^T G_V^{-1} F): the discrete dual norm of a load vector."""
    f = _vector(ops, F, "F")
    if not np.any(f):
        return 0.0
    z = ops.gram_factor.solve(f)
    return math.sqrt(max(float(f @ z), 0.0))


def lumped_norm(weights: np.ndarray, values: np.ndarray) -> float:
    """sqrt(sum_i w_i v_i^2) for lumped quadrature weights."""
    return math.sqrt(float(np.dot(weights, np.asarray(values, dtype=float) ** 2)))


def l2_distance(
    ops: AssembledOperators,
    U: np.ndarray,
    func: Callable[[np.ndarray], np.ndarray],
    n_points: int = 5,
) -> float:
    """||u_h - func||_{L2(omega)} by fine cell quadrature of the P1 function ``U``."""
    u = _vector(ops, U, "U")
    mesh = ops.mesh
    points, weights, basis, cell_index = interior_quadrature(mesh, n_points)
    u_h = np.einsum("qk,qk->q", basis, u[mesh.cells[cell_index]])
    diff = u_h - np.asarray(func(points), dtype=float)
    return math.sqrt(float(np.dot(weights, diff**2)))
