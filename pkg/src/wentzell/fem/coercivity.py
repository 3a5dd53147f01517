"""Coercivity and lumped-embedding constants from generalized eigenproblems."""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import linalg as splinalg

from wentzell.constants import COERCIVITY_SAMPLES, DENSE_EIGEN_LIMIT, EIGEN_MAX_ITER, EIGEN_TOL
from wentzell.errors import CoercivityError
from wentzell.fem.assembly import AssembledOperators

logger = logging.getLogger(__name__)


def estimate_coercivity(ops: AssembledOperators) -> float:
    """Smallest lambda with (K + R) x = lambda G_V x.

    Dense ``eigh`` for small meshes, shift-invert Lanczos about zero
    otherwise.
    """
    A = ops.operator
    B = ops.gram
    if ops.size <= DENSE_EIGEN_LIMIT:
        value = float(
            linalg.eigh(A.toarray(), B.toarray(), eigvals_only=True, subset_by_index=[0, 0])[0]
        )
    else:
        try:
            vals = splinalg.eigsh(
                A.tocsc(), k=1, M=B.tocsc(), sigma=0.0, which="LM", tol=EIGEN_TOL, maxiter=EIGEN_MAX_ITER
            )[0]
        except splinalg.ArpackNoConvergence as exc:
            raise CoercivityError(f"eigen-solver did not converge for {ops.size} dofs: {exc}") from exc
        value = float(vals.min())
    if not value > 0:
        raise CoercivityError(f"coercivity constant is not positive: {value}")
    logger.info("Coercivity constant M = %.10g (%d dofs)", value, ops.size)
    return value


def estimate_lumped_embedding(ops: AssembledOperators) -> tuple[float, float]:
    """(kappa_omega, kappa_gamma) with sum_i L_i u_i^2 <= kappa^2 U^T G_V U."""
    return _largest_ratio(ops, ops.lumped_omega), _largest_ratio(ops, ops.lumped_gamma)


def certify_coercivity(
    ops: AssembledOperators,
    rng: np.random.Generator,
    samples: int = COERCIVITY_SAMPLES,
) -> float:
    """Smallest Rayleigh quotient <(K+R)U, U> / <G_V U, U> over random U, minus M."""
    M = ops.require_coercivity
    U = rng.standard_normal((ops.size, samples))
    num = np.einsum("ij,ij->j", U, ops.operator @ U)
    den = np.einsum("ij,ij->j", U, ops.gram @ U)
    return float((num / den).min() - M)


def _largest_ratio(ops: AssembledOperators, weights: np.ndarray) -> float:
    L = sparse.diags(weights).tocsc()
    if not np.any(weights):
        return 0.0
    if ops.size <= DENSE_EIGEN_LIMIT:
        value = float(
            linalg.eigh(
                L.toarray(),
                ops.gram.toarray(),
                eigvals_only=True,
                subset_by_index=[ops.size - 1, ops.size - 1],
            )[0]
        )
    else:
        try:
            value = float(
                splinalg.eigsh(L, k=1, M=ops.gram.tocsc(), which="LA", tol=EIGEN_TOL, maxiter=EIGEN_MAX_ITER)[0][0]
            )
        except splinalg.ArpackNoConvergence as exc:
            raise CoercivityError(f"embedding eigen-solve did not converge: {exc}") from exc
    return math.sqrt(max(value, 0.0))
