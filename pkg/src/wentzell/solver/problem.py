"""Problem data for one backward Euler run and its construction from a ProblemConfig."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import sympy as sp

from wentzell.config import IntervalDomainConfig, ProblemConfig
from wentzell.constants import NEWTON_MAX_ITER, NEWTON_TOL
from wentzell.errors import DomainError
from wentzell.fem.assembly import AssembledOperators, BoundaryCoefficient, assemble
from wentzell.fem.mesh import DomainSpec, IntervalSpec, Mesh, PolygonSpec, build_mesh
from wentzell.graphlib.expressions import compile_expression, nx, ny, parse_expression, t, x, y
from wentzell.graphlib.graph import PiecewiseGraph, parse_graph
from wentzell.graphlib.mollifier import MollifierKernel
from wentzell.models import EpsSchedule, GrowthParams

logger = logging.getLogger(__name__)

_SPACE_TIME = (t, x, y, nx, ny)


@dataclass(frozen=True, eq=False)
class SourceTerm:
    """Space-time function of (t, x, y) and, on the boundary, the normal (nx, ny)."""

    expr: sp.Expr

    @classmethod
    def parse(cls, text: str | float) -> SourceTerm:
        return cls(parse_expression(text, ("t", "x", "y", "nx", "ny")))

    @cached_property
    def _func(self):  # type: ignore[no-untyped-def]
        return compile_expression(self.expr, _SPACE_TIME)

    @property
    def is_zero(self) -> bool:
        return bool(self.expr == 0)

    def __call__(self, time: float, points: np.ndarray, normals: np.ndarray | None = None) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        zeros = np.zeros(len(pts))
        ys = pts[:, 1] if pts.shape[1] > 1 else zeros
        if normals is None:
            n_x = n_y = zeros
        else:
            nrm = np.atleast_2d(np.asarray(normals, dtype=float))
            n_x = nrm[:, 0]
            n_y = nrm[:, 1] if nrm.shape[1] > 1 else zeros
        return self._func(np.full(len(pts), float(time)), pts[:, 0], ys, n_x, n_y)


@dataclass(frozen=True, eq=False)
class SolveConfig:
    """Everything one backward Euler run needs.

    The time grid is uniform with ``n_steps = ceil(T / dt)`` steps of size
    ``T / n_steps``.
    """

    domain: DomainSpec
    mesh_level: int
    T: float
    dt: float
    eps: float
    gamma1: PiecewiseGraph
    gamma2: PiecewiseGraph
    f1: SourceTerm
    f2: SourceTerm
    u0: SourceTerm
    a_field: BoundaryCoefficient
    growth1: GrowthParams | None = None
    growth2: GrowthParams | None = None
    exact: SourceTerm | None = None
    newton_tol: float = NEWTON_TOL
    newton_max_iter: int = NEWTON_MAX_ITER
    initial_projection: str = "interpolation"
    schedule: EpsSchedule = EpsSchedule.GEOMETRIC
    kernel: MollifierKernel = field(default_factory=MollifierKernel.bump)

    def __post_init__(self) -> None:
        for name in ("T", "dt", "eps", "newton_tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive, got {value}")
        if self.newton_max_iter < 1:
            raise DomainError(f"newton_max_iter must be at least 1, got {self.newton_max_iter}")
        if self.mesh_level < 0:
            raise DomainError(f"mesh level must be nonnegative, got {self.mesh_level}")
        if self.initial_projection not in ("interpolation", "l2"):
            raise DomainError(f"unknown initial projection {self.initial_projection!r}")

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.T / self.dt - 1e-9))

    @property
    def step_size(self) -> float:
        return self.T / self.n_steps

    def build_mesh(self) -> Mesh:
        return build_mesh(self.domain, self.mesh_level)

    def assemble(self, *, coercivity: bool = True) -> AssembledOperators:
        return assemble(self.build_mesh(), self.a_field, coercivity=coercivity)


# ---------------------------------------------------------------------------
# From config
# ---------------------------------------------------------------------------


def domain_spec(problem: ProblemConfig) -> DomainSpec:
    dom = problem.domain
    if isinstance(dom, IntervalDomainConfig):
        return IntervalSpec(dom.x0, dom.x1, dom.n)
    return PolygonSpec(tuple(tuple(v) for v in dom.vertices), dom.h)  # type: ignore[misc]


def growth_params(problem: ProblemConfig) -> tuple[GrowthParams | None, GrowthParams | None]:
    out = []
    for graph_cfg in (problem.reaction.gamma1, problem.reaction.gamma2):
        g = graph_cfg.growth
        out.append(None if g is None else GrowthParams(g.c, g.theta, g.d))
    return out[0], out[1]


def build_solve_config(problem: ProblemConfig, level: int = 0) -> SolveConfig:
    """SolveConfig of refinement level ``level``.

    Level m refines the base mesh m more times and halves dt m times; a
    geometric schedule halves eps alongside.
    """
    if level < 0:
        raise DomainError(f"refinement level must be nonnegative, got {level}")
    from wentzell.solver.manufactured import manufactured_sources

    scale = 2.0**-level
    schedule = EpsSchedule(problem.regularization.schedule)
    eps = problem.regularization.eps * (scale if schedule is EpsSchedule.GEOMETRIC else 1.0)
    gamma1 = parse_graph(problem.reaction.gamma1.graph_spec())
    gamma2 = parse_graph(problem.reaction.gamma2.graph_spec())
    a_field = BoundaryCoefficient.parse(problem.boundary.a, problem.boundary.a0)
    spec = domain_spec(problem)
    sources = problem.sources

    exact = SourceTerm.parse(sources.exact) if sources.exact is not None else None
    if sources.manufactured and exact is not None:
        dim = 1 if isinstance(spec, IntervalSpec) else 2
        f1, f2 = manufactured_sources(exact.expr, gamma1, gamma2, a_field, dim)
        u0 = SourceTerm(exact.expr.subs(t, 0))
    else:
        f1 = SourceTerm.parse(sources.f1)
        f2 = SourceTerm.parse(sources.f2)
        u0 = SourceTerm.parse(sources.u0)

    g1, g2 = growth_params(problem)
    return SolveConfig(
        domain=spec,
        mesh_level=problem.mesh_level + level,
        T=problem.time.T,
        dt=problem.time.dt * scale,
        eps=eps,
        gamma1=gamma1,
        gamma2=gamma2,
        f1=f1,
        f2=f2,
        u0=u0,
        a_field=a_field,
        growth1=g1,
        growth2=g2,
        exact=exact,
        newton_tol=problem.newton.tol,
        newton_max_iter=problem.newton.max_iter,
        initial_projection=sources.initial_projection,
        schedule=schedule,
    )
