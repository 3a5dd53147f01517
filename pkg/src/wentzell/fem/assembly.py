"""P1 assembly of the product-space operators.

Builds the interior mass M_omega, boundary mass M_gamma, stiffness K, Robin
matrix R (from the boundary coefficient a), the Gram matrix
G_V = K + M_omega + M_gamma of the energy space and the lumped (row-sum)
masses used for the nonlinear terms.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import io as spio
from scipy import sparse
from scipy.sparse import linalg as splinalg

from wentzell.errors import AssemblyError
from wentzell.fem.mesh import Mesh
from wentzell.graphlib.expressions import (
    compile_expression,
    parse_expression,
    polynomial_degree,
    x,
    y,
)

logger = logging.getLogger(__name__)

ROBIN_HYPOTHESIS = "a >= a0 > 0"

_LOCAL_MASS_TRIANGLE = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0
_LOCAL_MASS_SEGMENT = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
_REF_GRADIENTS = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])


# ---------------------------------------------------------------------------
# Boundary coefficient
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BoundaryCoefficient:
    """Robin coefficient a(x, y) on the boundary with its lower bound a0."""

    text: str
    a0: float
    degree: int | None

    @classmethod
    def parse(cls, text: str | float, a0: float) -> BoundaryCoefficient:
        if not a0 > 0:
            raise AssemblyError(
                f"boundary coefficient bound a0 = {a0} violates {ROBIN_HYPOTHESIS}",
                hypothesis=ROBIN_HYPOTHESIS,
            )
        expr = parse_expression(text, ("x", "y"))
        return cls(text=str(text), a0=float(a0), degree=polynomial_degree(expr, (x, y)))

    @cached_property
    def _func(self):  # type: ignore[no-untyped-def]
        return compile_expression(parse_expression(self.text, ("x", "y")), (x, y))

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        ys = pts[:, 1] if pts.shape[1] > 1 else np.zeros(len(pts))
        return self._func(pts[:, 0], ys)

    @property
    def quadrature_points(self) -> int:
        """Gauss points per facet: exact for polynomial a, three otherwise."""
        if self.degree is None:
            return 3
        return max(1, math.ceil((self.degree + 3) / 2))


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AssembledOperators:
    """Assembled sparse operators on one mesh.

    ``lumped_gamma`` is a full-length vector, zero away from the boundary.
    ``coercivity`` is the smallest generalized eigenvalue of
    (K + R) x = lambda G_V x once estimated.
    """

    mesh: Mesh
    mass_omega: sparse.csr_matrix
    mass_gamma: sparse.csr_matrix
    stiffness: sparse.csr_matrix
    robin: sparse.csr_matrix
    gram: sparse.csr_matrix
    lumped_omega: np.ndarray
    lumped_gamma: np.ndarray
    a_field: BoundaryCoefficient
    coercivity: float | None = None

    @property
    def size(self) -> int:
        return self.mesh.n_vertices

    @cached_property
    def mass_h(self) -> sparse.csr_matrix:
        """Gram matrix of the product inner product (M_omega + M_gamma)."""
        return (self.mass_omega + self.mass_gamma).tocsr()

    @cached_property
    def operator(self) -> sparse.csr_matrix:
        """K + R."""
        return (self.stiffness + self.robin).tocsr()

    @cached_property
    def lumped_h(self) -> np.ndarray:
        return self.lumped_omega + self.lumped_gamma

    @cached_property
    def gram_factor(self) -> splinalg.SuperLU:
        try:
            return splinalg.splu(self.gram.tocsc())
        except RuntimeError as exc:
            raise AssemblyError(f"Gram matrix factorization failed: {exc}") from exc

    @property
    def measure_omega(self) -> float:
        return float(self.lumped_omega.sum())

    @property
    def measure_gamma(self) -> float:
        return float(self.lumped_gamma.sum())

    @property
    def require_coercivity(self) -> float:
        if self.coercivity is None:
            raise AssemblyError("coercivity constant has not been estimated")
        return self.coercivity

    def with_coercivity(self, value: float) -> AssembledOperators:
        return replace(self, coercivity=value)


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


def assemble(mesh: Mesh, a_field: BoundaryCoefficient, *, coercivity: bool = True) -> AssembledOperators:
    """Assemble all operators on ``mesh`` and, by default, estimate M."""
    if not a_field.a0 > 0:
        raise AssemblyError(
            f"boundary coefficient bound a0 = {a_field.a0} violates {ROBIN_HYPOTHESIS}",
            hypothesis=ROBIN_HYPOTHESIS,
        )
    n = mesh.n_vertices
    if mesh.dim == 1:
        stiffness, mass_omega = _interior_1d(mesh)
    else:
        stiffness, mass_omega = _interior_2d(mesh)
    mass_gamma, robin = _boundary(mesh, a_field)

    ops = AssembledOperators(
        mesh=mesh,
        mass_omega=mass_omega,
        mass_gamma=mass_gamma,
        stiffness=stiffness,
        robin=robin,
        gram=(stiffness + mass_omega + mass_gamma).tocsr(),
        lumped_omega=np.asarray(mass_omega.sum(axis=1)).ravel(),
        lumped_gamma=np.asarray(mass_gamma.sum(axis=1)).ravel(),
        a_field=a_field,
    )
    logger.info(
        "Assembled %d dofs: |omega|=%.6g |gamma|=%.6g", n, ops.measure_omega, ops.measure_gamma
    )
    if coercivity:
        from wentzell.fem.coercivity import estimate_coercivity

        ops = ops.with_coercivity(estimate_coercivity(ops))
    return ops


def export_operators(ops: AssembledOperators, directory: Path) -> list[Path]:
    """Write every operator as a Matrix Market coordinate file."""
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in ("mass_omega", "mass_gamma", "stiffness", "robin", "gram"):
        path = directory / f"{name}.mtx"
        spio.mmwrite(str(path), getattr(ops, name), precision=17)
        written.append(path)
    return written


def boundary_quadrature(mesh: Mesh, n_points: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Quadrature on all boundary facets.

    Returns (points, weights, basis, facet_index) where ``basis[q]`` holds
    the values of the facet's vertex hat functions at point q.  In 1D every
    facet is a single vertex of unit (counting) measure.
    """
    if mesh.dim == 1:
        pts = mesh.vertices[mesh.facets[:, 0]]
        return pts, np.ones(len(pts)), np.ones((len(pts), 1)), np.arange(len(pts))
    nodes, weights = leggauss(n_points)
    s = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    p = mesh.vertices[mesh.facets[:, 0]]
    q = mesh.vertices[mesh.facets[:, 1]]
    points = (p[:, None, :] * (1.0 - s)[None, :, None] + q[:, None, :] * s[None, :, None]).reshape(-1, 2)
    lengths = mesh.facet_measures
    wts = (lengths[:, None] * w[None, :]).ravel()
    basis = np.tile(np.column_stack([1.0 - s, s]), (len(lengths), 1))
    facet_index = np.repeat(np.arange(len(lengths)), len(s))
    return points, wts, basis, facet_index


def interior_quadrature(mesh: Mesh, n_points: int = 4) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Quadrature on all cells: (points, weights, basis, cell_index).

    Gauss-Legendre per segment in 1D; collapsed (Duffy) Gauss products on
    triangles, with ``n_points ** 2`` points per cell.
    """
    nodes, weights = leggauss(n_points)
    s = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    v = mesh.vertices
    cells = mesh.cells
    if mesh.dim == 1:
        a = v[cells[:, 0], 0]
        h = mesh.cell_measures
        points = (a[:, None] + h[:, None] * s[None, :]).reshape(-1, 1)
        wts = (h[:, None] * w[None, :]).ravel()
        basis = np.tile(np.column_stack([1.0 - s, s]), (mesh.n_cells, 1))
        return points, wts, basis, np.repeat(np.arange(mesh.n_cells), len(s))

    xi = np.repeat(s, len(s))
    eta = np.tile(s, len(s)) * (1.0 - xi)
    ref_w = np.outer(w, w).ravel() * (1.0 - xi)  # sums to 1/2
    ref_basis = np.column_stack([1.0 - xi - eta, xi, eta])
    p0 = v[cells[:, 0]]
    e1 = v[cells[:, 1]] - p0
    e2 = v[cells[:, 2]] - p0
    points = (
        p0[:, None, :] + xi[None, :, None] * e1[:, None, :] + eta[None, :, None] * e2[:, None, :]
    ).reshape(-1, 2)
    wts = (2.0 * mesh.cell_measures[:, None] * ref_w[None, :]).ravel()
    basis = np.tile(ref_basis, (mesh.n_cells, 1))
    return points, wts, basis, np.repeat(np.arange(mesh.n_cells), len(xi))


# ---------------------------------------------------------------------------
# Internals
# ---------------------------------------------------------------------------


def _coo(rows: np.ndarray, cols: np.ndarray, vals: np.ndarray, n: int) -> sparse.csr_matrix:
    return sparse.coo_matrix((vals.ravel(), (rows.ravel(), cols.ravel())), shape=(n, n)).tocsr()


def _interior_1d(mesh: Mesh) -> tuple[sparse.csr_matrix, sparse.csr_matrix]:
    h = mesh.cell_measures
    cells = mesh.cells
    rows = np.repeat(cells, 2, axis=1)
    cols = np.tile(cells, (1, 2))
    local_k = np.array([[1.0, -1.0], [-1.0, 1.0]])
    k_vals = (1.0 / h)[:, None, None] * local_k[None]
    m_vals = h[:, None, None] * _LOCAL_MASS_SEGMENT[None]
    n = mesh.n_vertices
    return _coo(rows, cols, k_vals, n), _coo(rows, cols, m_vals, n)


def _interior_2d(mesh: Mesh) -> tuple[sparse.csr_matrix, sparse.csr_matrix]:
    v = mesh.vertices
    cells = mesh.cells
    jac = np.stack(
        [v[cells[:, 1]] - v[cells[:, 0]], v[cells[:, 2]] - v[cells[:, 0]]], axis=2
    )  # (m, 2, 2), columns are edge vectors
    inv = np.linalg.inv(jac)
    grads = np.einsum("ij,mjk->mik", _REF_GRADIENTS, inv)  # (m, 3, 2)
    area = mesh.cell_measures
    k_vals = np.einsum("m,mik,mjk->mij", area, grads, grads)
    m_vals = area[:, None, None] * _LOCAL_MASS_TRIANGLE[None]
    rows = np.repeat(cells, 3, axis=1)
    cols = np.tile(cells, (1, 3))
    n = mesh.n_vertices
    return _coo(rows, cols, k_vals, n), _coo(rows, cols, m_vals, n)


def _boundary(mesh: Mesh, a_field: BoundaryCoefficient) -> tuple[sparse.csr_matrix, sparse.csr_matrix]:
    n = mesh.n_vertices
    facets = mesh.facets
    a_vertices = a_field(mesh.vertices[mesh.boundary_vertices])
    if mesh.dim == 1:
        idx = facets[:, 0]
        mass = sparse.coo_matrix((np.ones(len(idx)), (idx, idx)), shape=(n, n)).tocsr()
        a_vals = a_field(mesh.vertices[idx])
        _check_lower_bound(np.concatenate([a_vertices, a_vals]), a_field)
        robin = sparse.coo_matrix((a_vals, (idx, idx)), shape=(n, n)).tocsr()
        return mass, robin

    lengths = mesh.facet_measures
    rows = np.repeat(facets, 2, axis=1)
    cols = np.tile(facets, (1, 2))
    m_vals = lengths[:, None, None] * _LOCAL_MASS_SEGMENT[None]
    mass = _coo(rows, cols, m_vals, n)

    points, weights, basis, facet_index = boundary_quadrature(mesh, a_field.quadrature_points)
    a_vals = a_field(points)
    _check_lower_bound(np.concatenate([a_vertices, a_vals]), a_field)
    contrib = (weights * a_vals)[:, None, None] * basis[:, :, None] * basis[:, None, :]
    r_vals = np.zeros((len(facets), 2, 2))
    np.add.at(r_vals, facet_index, contrib)
    robin = _coo(rows, cols, r_vals, n)
    return mass, robin


def _check_lower_bound(values: np.ndarray, a_field: BoundaryCoefficient) -> None:
    if not np.all(np.isfinite(values)):
        raise AssemblyError(f"boundary coefficient {a_field.text!r} is not finite on the boundary")
    worst = float(values.min())
    if worst < a_field.a0 - 1e-12 * max(1.0, abs(a_field.a0)):
        raise AssemblyError(
            f"boundary coefficient {a_field.text!r} drops to {worst:.6g} below a0 = {a_field.a0}; "
            f"needs {ROBIN_HYPOTHESIS}",
            hypothesis=ROBIN_HYPOTHESIS,
        )
