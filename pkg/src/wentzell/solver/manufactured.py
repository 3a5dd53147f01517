"""Manufactured sources: substitute an exact solution into both equations."""

from __future__ import annotations

import sympy as sp

from wentzell.errors import GraphError
from wentzell.fem.assembly import BoundaryCoefficient
from wentzell.graphlib.expressions import nx, ny, parse_expression, t, x, y
from wentzell.graphlib.graph import PiecewiseGraph
from wentzell.solver.problem import SourceTerm


def manufactured_sources(
    exact: sp.Expr,
    gamma1: PiecewiseGraph,
    gamma2: PiecewiseGraph,
    a_field: BoundaryCoefficient,
    dim: int,
) -> tuple[SourceTerm, SourceTerm]:
    """(f1, f2) such that ``exact`` solves the interior and dynamic boundary equations.

    f1 = u_t - Laplace(u) + gamma1(u) in the domain and
    f2 = u_t + grad(u) . n + a u + gamma2(u) on the boundary.  Both graphs
    must be smooth.
    """
    for name, g in (("gamma1", gamma1), ("gamma2", gamma2)):
        if not g.is_smooth:
            raise GraphError(f"manufactured sources need a smooth {name}, got {g.source!r}")
    u = exact
    laplacian = sp.diff(u, x, 2) + (sp.diff(u, y, 2) if dim == 2 else 0)
    normal_flux = sp.diff(u, x) * nx + (sp.diff(u, y) * ny if dim == 2 else 0)
    a = parse_expression(a_field.text, ("x", "y"))
    # xreplace does not recurse into the replacement, so t inside u is left alone
    g1 = gamma1.expression.xreplace({t: u})
    g2 = gamma2.expression.xreplace({t: u})
    f1 = sp.diff(u, t) - laplacian + g1
    f2 = sp.diff(u, t) + normal_flux + a * u + g2
    return SourceTerm(f1), SourceTerm(f2)
