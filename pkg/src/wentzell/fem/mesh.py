"""Simplicial meshes of intervals and polygons, with nested uniform refinement."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse

from wentzell.errors import MeshError

logger = logging.getLogger(__name__)

_MAX_REFINEMENTS = 12


# ---------------------------------------------------------------------------
# Domain descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalSpec:
    x0: float
    x1: float
    n: int


@dataclass(frozen=True)
class PolygonSpec:
    """Vertex loop (either orientation) and target edge length."""

    vertices: tuple[tuple[float, float], ...]
    h: float


DomainSpec = IntervalSpec | PolygonSpec


# ---------------------------------------------------------------------------
# Mesh
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Mesh:
    """Conforming P1 mesh.

    Boundary facets are vertex index tuples (a single vertex in 1D, an edge
    traversed counter-clockwise in 2D) with outward unit normals.  In 1D the
    boundary carries the counting measure.
    """

    dim: int
    vertices: np.ndarray
    cells: np.ndarray
    facets: np.ndarray
    facet_normals: np.ndarray

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise MeshError(f"unsupported dimension {self.dim}")
        if self.vertices.shape[1] != self.dim or self.cells.shape[1] != self.dim + 1:
            raise MeshError("vertex or cell arrays do not match the dimension")
        if np.any(self.cell_measures <= 0):
            raise MeshError("mesh has cells with non-positive measure")

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_cells(self) -> int:
        return int(self.cells.shape[0])

    @cached_property
    def boundary_vertices(self) -> np.ndarray:
        return np.unique(self.facets)

    @cached_property
    def cell_measures(self) -> np.ndarray:
        v = self.vertices
        if self.dim == 1:
            return v[self.cells[:, 1], 0] - v[self.cells[:, 0], 0]
        e1 = v[self.cells[:, 1]] - v[self.cells[:, 0]]
        e2 = v[self.cells[:, 2]] - v[self.cells[:, 0]]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    @cached_property
    def facet_measures(self) -> np.ndarray:
        if self.dim == 1:
            return np.ones(len(self.facets))
        v = self.vertices
        return np.linalg.norm(v[self.facets[:, 1]] - v[self.facets[:, 0]], axis=1)

    @cached_property
    def size(self) -> float:
        """Longest cell edge."""
        if self.dim == 1:
            return float(self.cell_measures.max())
        v = self.vertices
        longest = 0.0
        for i, j in ((0, 1), (1, 2), (2, 0)):
            lengths = np.linalg.norm(v[self.cells[:, j]] - v[self.cells[:, i]], axis=1)
            longest = max(longest, float(lengths.max()))
        return longest

    @property
    def volume(self) -> float:
        return float(self.cell_measures.sum())

    @property
    def boundary_measure(self) -> float:
        return float(self.facet_measures.sum())


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


def build_mesh(spec: DomainSpec, level: int = 0) -> Mesh:
    """Mesh ``spec`` and apply ``level`` further uniform refinements."""
    match spec:
        case IntervalSpec():
            mesh = _interval_mesh(spec)
        case PolygonSpec():
            mesh = _polygon_mesh(spec)
        case _:
            raise MeshError(f"unknown domain descriptor {spec!r}")
    for _ in range(level):
        mesh, _ = refine_mesh(mesh)
    logger.info(
        "Mesh: dim=%d vertices=%d cells=%d h=%.4g", mesh.dim, mesh.n_vertices, mesh.n_cells, mesh.size
    )
    return mesh


def refine_mesh(mesh: Mesh) -> tuple[Mesh, sparse.csr_matrix]:
    """Uniform refinement plus the prolongation matrix (fine x coarse).

    Coarse P1 functions are reproduced exactly by the prolongation, so the
    coarse space is contained in the fine one.
    """
    if mesh.dim == 1:
        return _refine_interval(mesh)
    return _refine_triangles(mesh)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def _interval_mesh(spec: IntervalSpec) -> Mesh:
    if spec.n < 1:
        raise MeshError(f"interval needs at least one cell, got n={spec.n}")
    if not spec.x1 > spec.x0:
        raise MeshError(f"degenerate interval ({spec.x0}, {spec.x1})")
    x = np.linspace(spec.x0, spec.x1, spec.n + 1)
    cells = np.column_stack([np.arange(spec.n), np.arange(1, spec.n + 1)])
    return Mesh(
        dim=1,
        vertices=x[:, None],
        cells=cells,
        facets=np.array([[0], [spec.n]]),
        facet_normals=np.array([[-1.0], [1.0]]),
    )


def _polygon_mesh(spec: PolygonSpec) -> Mesh:
    pts = np.asarray(spec.vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise MeshError("polygon needs at least three (x, y) vertices")
    if not spec.h > 0:
        raise MeshError(f"target mesh size must be positive, got {spec.h}")
    nxt = np.roll(pts, -1, axis=0)
    if np.any(np.linalg.norm(nxt - pts, axis=1) == 0):
        raise MeshError("polygon has repeated consecutive vertices")
    cross = pts[:, 0] * nxt[:, 1] - nxt[:, 0] * pts[:, 1]
    area = 0.5 * cross.sum()
    if abs(area) < 1e-14:
        raise MeshError("polygon has zero area")
    if area < 0:
        pts = pts[::-1].copy()
        nxt = np.roll(pts, -1, axis=0)
        cross = pts[:, 0] * nxt[:, 1] - nxt[:, 0] * pts[:, 1]
        area = -area
    centroid = ((pts + nxt) * cross[:, None]).sum(axis=0) / (6.0 * area)

    k = len(pts)
    ring = np.arange(k)
    cells = np.column_stack([np.full(k, k), ring, np.roll(ring, -1)])
    facets = np.column_stack([ring, np.roll(ring, -1)])
    tangent = nxt - pts
    normals = np.column_stack([tangent[:, 1], -tangent[:, 0]])
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    try:
        mesh = Mesh(
            dim=2,
            vertices=np.vstack([pts, centroid]),
            cells=cells,
            facets=facets,
            facet_normals=normals,
        )
    except MeshError as exc:
        raise MeshError("polygon is not star-shaped about its centroid") from exc

    for _ in range(_MAX_REFINEMENTS):
        if mesh.size <= spec.h:
            return mesh
        mesh, _ = _refine_triangles(mesh)
    if mesh.size > spec.h:
        raise MeshError(f"target size h={spec.h} needs more than {_MAX_REFINEMENTS} refinements")
    return mesh


def _refine_interval(mesh: Mesh) -> tuple[Mesh, sparse.csr_matrix]:
    x = mesh.vertices[:, 0]
    n = len(x)
    fine = np.empty(2 * n - 1)
    fine[0::2] = x
    fine[1::2] = 0.5 * (x[:-1] + x[1:])
    m = len(fine) - 1
    refined = Mesh(
        dim=1,
        vertices=fine[:, None],
        cells=np.column_stack([np.arange(m), np.arange(1, m + 1)]),
        facets=np.array([[0], [m]]),
        facet_normals=mesh.facet_normals.copy(),
    )
    rows = np.concatenate([np.arange(0, 2 * n - 1, 2), np.repeat(np.arange(1, 2 * n - 1, 2), 2)])
    cols = np.concatenate([np.arange(n), np.column_stack([np.arange(n - 1), np.arange(1, n)]).ravel()])
    vals = np.concatenate([np.ones(n), np.full(2 * (n - 1), 0.5)])
    prolong = sparse.coo_matrix((vals, (rows, cols)), shape=(2 * n - 1, n)).tocsr()
    return refined, prolong


def _refine_triangles(mesh: Mesh) -> tuple[Mesh, sparse.csr_matrix]:
    n = mesh.n_vertices
    cells = mesh.cells
    m = len(cells)
    local = cells[:, [[0, 1], [1, 2], [2, 0]]]
    keys = np.sort(local, axis=2).reshape(-1, 2)
    edges, inverse = np.unique(keys, axis=0, return_inverse=True)
    mid = n + np.asarray(inverse).ravel().reshape(m, 3)

    vertices = np.vstack([mesh.vertices, 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])])
    a, b, c = cells.T
    ab, bc, ca = mid.T
    new_cells = np.vstack(
        [
            np.column_stack([a, ab, ca]),
            np.column_stack([ab, b, bc]),
            np.column_stack([ca, bc, c]),
            np.column_stack([ab, bc, ca]),
        ]
    )

    lookup = {(int(p), int(q)): n + i for i, (p, q) in enumerate(edges)}
    facet_mid = np.array([lookup[tuple(sorted((int(p), int(q))))] for p, q in mesh.facets])
    new_facets = np.vstack(
        [
            np.column_stack([mesh.facets[:, 0], facet_mid]),
            np.column_stack([facet_mid, mesh.facets[:, 1]]),
        ]
    )
    new_normals = np.vstack([mesh.facet_normals, mesh.facet_normals])

    ne = len(edges)
    rows = np.concatenate([np.arange(n), np.repeat(n + np.arange(ne), 2)])
    cols = np.concatenate([np.arange(n), edges.ravel()])
    vals = np.concatenate([np.ones(n), np.full(2 * ne, 0.5)])
    prolong = sparse.coo_matrix((vals, (rows, cols)), shape=(n + ne, n)).tocsr()

    refined = Mesh(
        dim=2,
        vertices=vertices,
        cells=new_cells,
        facets=new_facets,
        facet_normals=new_normals,
    )
    return refined, prolong
