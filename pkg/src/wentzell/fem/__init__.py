"""P1 finite elements on the product space of interior and boundary functions."""

from wentzell.fem.assembly import (
    AssembledOperators,
    BoundaryCoefficient,
    assemble,
    boundary_quadrature,
    export_operators,
    interior_quadrature,
)
from wentzell.fem.coercivity import (
    certify_coercivity,
    estimate_coercivity,
    estimate_lumped_embedding,
)
from wentzell.fem.mesh import IntervalSpec, Mesh, PolygonSpec, build_mesh, refine_mesh
from wentzell.fem.norms import (
    h_norm,
    l2_distance,
    lumped_norm,
    product_inner,
    riesz_dual_norm,
    v_norm,
)

__all__ = [
    "AssembledOperators",
    "BoundaryCoefficient",
    "IntervalSpec",
    "Mesh",
    "PolygonSpec",
    "assemble",
    "boundary_quadrature",
    "build_mesh",
    "certify_coercivity",
    "estimate_coercivity",
    "estimate_lumped_embedding",
    "export_operators",
    "h_norm",
    "interior_quadrature",
    "l2_distance",
    "lumped_norm",
    "product_inner",
    "refine_mesh",
    "riesz_dual_norm",
    "v_norm",
]
