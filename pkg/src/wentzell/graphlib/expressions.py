"""Restricted parsing of expression strings into sympy expressions.

Graph segments are written in the variable ``t``; sources and boundary
coefficients in ``t, x, y`` and, for boundary sources, the outward normal
components ``nx, ny``.  Only arithmetic, powers and the elementary functions
below are accepted.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from typing import Any

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from wentzell.errors import GraphError

t, x, y, nx, ny = sp.symbols("t x y nx ny", real=True)

SYMBOLS: dict[str, sp.Symbol] = {"t": t, "x": x, "y": y, "nx": nx, "ny": ny}

_FUNCTIONS: dict[str, Any] = {
    "sin": sp.sin,
    "cos": sp.cos,
    "exp": sp.exp,
    "tanh": sp.tanh,
    "abs": sp.Abs,
    "sign": sp.sign,
    "pi": sp.pi,
}

_ALLOWED_HEADS = (sp.sin, sp.cos, sp.exp, sp.tanh, sp.Abs, sp.sign)

_TRANSFORMATIONS = standard_transformations + (convert_xor,)


def parse_expression(text: str | float | int, variables: Iterable[str] = ("t",)) -> sp.Expr:
    """Parse ``text`` into a sympy expression over ``variables``.

    Raises
    ------
    GraphError
        On syntax errors, unknown names, disallowed functions or non-finite
        constants.
    """
    names = tuple(variables)
    local = {name: SYMBOLS[name] for name in names}
    local.update(_FUNCTIONS)
    source = str(text).strip()
    if not source:
        raise GraphError("empty expression")
    try:
        expr = parse_expr(source, local_dict=local, transformations=_TRANSFORMATIONS)
    except (SyntaxError, TypeError, ValueError, AttributeError, NameError) as exc:
        raise GraphError(f"cannot parse expression {source!r}: {exc}") from exc
    expr = sp.sympify(expr)
    if not isinstance(expr, sp.Expr) or expr.has(sp.I):
        raise GraphError(f"expression {source!r} is not a real scalar expression")

    allowed = {local[name] for name in names}
    unknown = expr.free_symbols - allowed
    if unknown:
        listed = ", ".join(sorted(str(s) for s in unknown))
        raise GraphError(f"expression {source!r} uses unknown names: {listed}")
    for sub in sp.preorder_traversal(expr):
        if isinstance(sub, sp.Function) and not isinstance(sub, _ALLOWED_HEADS):
            raise GraphError(f"function {sub.func} is not allowed in {source!r}")
    if expr.has(sp.zoo, sp.oo, -sp.oo, sp.nan):
        raise GraphError(f"expression {source!r} is not finite")
    return expr


def compile_expression(expr: sp.Expr, variables: Iterable[sp.Symbol]) -> Callable[..., np.ndarray]:
    """Lambdify ``expr`` so that it broadcasts over numpy arrays.

    Constant expressions come back as scalars from lambdify; the wrapper
    broadcasts them to the shape of the first argument.
    """
    symbols = tuple(variables)
    func = sp.lambdify(symbols, expr, modules="numpy")

    def evaluate(*args: Any) -> np.ndarray:
        arrays = [np.asarray(a, dtype=float) for a in args]
        shape = np.broadcast_shapes(*(a.shape for a in arrays)) if arrays else ()
        with np.errstate(all="ignore"):
            values = np.asarray(func(*arrays), dtype=float)
        return np.broadcast_to(values, shape).copy() if values.shape != shape else values

    return evaluate


def is_polynomial(expr: sp.Expr, symbol: sp.Symbol = t) -> bool:
    return bool(expr.is_polynomial(symbol))


def polynomial_degree(expr: sp.Expr, symbols: Iterable[sp.Symbol]) -> int | None:
    """Total degree of ``expr`` in ``symbols``, or None if it is not a polynomial."""
    gens = tuple(symbols)
    if not expr.is_polynomial(*gens):
        return None
    if expr.is_zero:
        return 0
    return int(sp.Poly(expr, *gens).total_degree())
