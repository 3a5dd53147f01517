"""Locally bounded nonmonotone graphs: limits, envelopes, Clarke derivatives, mollification."""

from wentzell.graphlib.graph import (
    PiecewiseGraph,
    chang_envelope,
    clarke_dd,
    clarke_dd_many,
    directional_derivative,
    is_regular,
    one_sided_limits,
    parse_graph,
    potential,
    potential_many,
    product_clarke_dd,
    windowed_envelope,
)
from wentzell.graphlib.hypotheses import (
    check_gradient_growth,
    check_growth,
    check_rauch_condition,
    check_sign_condition,
)
from wentzell.graphlib.mollifier import (
    MollifierKernel,
    mollify,
    mollify_derivative,
    mollify_derivative_many,
    mollify_many,
)

__all__ = [
    "MollifierKernel",
    "PiecewiseGraph",
    "chang_envelope",
    "check_gradient_growth",
    "check_growth",
    "check_rauch_condition",
    "check_sign_condition",
    "clarke_dd",
    "clarke_dd_many",
    "directional_derivative",
    "is_regular",
    "mollify",
    "mollify_derivative",
    "mollify_derivative_many",
    "mollify_many",
    "one_sided_limits",
    "parse_graph",
    "potential",
    "potential_many",
    "product_clarke_dd",
    "windowed_envelope",
]
