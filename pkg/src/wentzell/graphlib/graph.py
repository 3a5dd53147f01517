"""Piecewise smooth graphs, one-sided limits, Chang envelopes and Clarke derivatives.

A :class:`PiecewiseGraph` stores strictly increasing breakpoints and one
smooth segment per open interval between them (two unbounded tails
included).  ``sign`` and ``abs`` inside a segment expression are resolved at
construction: every real zero of their argument becomes a breakpoint, so each
stored segment is smooth on its interval.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from itertools import pairwise
from typing import Any

import numpy as np
import sympy as sp
from scipy import integrate
from sympy.calculus.util import continuous_domain

from wentzell.constants import WINDOW_SAMPLES
from wentzell.errors import GraphError
from wentzell.graphlib.expressions import compile_expression, is_polynomial, parse_expression, t
from wentzell.models import Convention, Envelope

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Segments
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Segment:
    """Smooth piece of a graph on the open interval (lower, upper)."""

    lower: float
    upper: float
    expr: sp.Expr
    func: Callable[..., np.ndarray]
    derivative: Callable[..., np.ndarray]
    antiderivative: Callable[..., np.ndarray] | None

    @classmethod
    def build(cls, lower: float, upper: float, expr: sp.Expr) -> Segment:
        anti = None
        if is_polynomial(expr):
            anti = compile_expression(sp.integrate(expr, t), (t,))
        return cls(
            lower=lower,
            upper=upper,
            expr=expr,
            func=compile_expression(expr, (t,)),
            derivative=compile_expression(sp.diff(expr, t), (t,)),
            antiderivative=anti,
        )

    def limit(self, point: float, direction: str) -> float:
        """One-sided limit of the segment expression at an endpoint."""
        value = float(self.func(point))
        if math.isfinite(value):
            return value
        try:
            value = float(sp.limit(self.expr, t, sp.nsimplify(point), dir=direction))
        except (TypeError, ValueError, NotImplementedError) as exc:
            raise GraphError(f"no finite limit of {self.expr} at {point}{direction}") from exc
        if not math.isfinite(value):
            raise GraphError(f"limit of {self.expr} at {point}{direction} is not finite")
        return value

    def integral(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Signed integrals from ``a`` to ``b`` (elementwise)."""
        if self.antiderivative is not None:
            return self.antiderivative(b) - self.antiderivative(a)
        out = np.zeros(np.broadcast(a, b).shape)
        for i, (lo, hi) in enumerate(zip(np.ravel(a), np.ravel(b), strict=True)):
            if lo != hi:
                out.flat[i] = integrate.quad(
                    lambda s: float(self.func(s)), lo, hi, epsabs=1e-13, epsrel=1e-13, limit=200
                )[0]
        return out


# ---------------------------------------------------------------------------
# Graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PiecewiseGraph:
    """Locally bounded function given by breakpoints and smooth segments.

    ``left_limits[i]`` and ``right_limits[i]`` are gamma(b_i - 0) and
    gamma(b_i + 0).  Pointwise evaluation at a breakpoint returns the limit
    picked by ``convention``.
    """

    breakpoints: np.ndarray
    segments: tuple[Segment, ...]
    left_limits: np.ndarray
    right_limits: np.ndarray
    convention: Convention = Convention.RIGHT
    source: str = ""

    def __post_init__(self) -> None:
        if len(self.segments) != len(self.breakpoints) + 1:
            raise GraphError("a graph needs exactly one segment more than breakpoints")
        if len(self.breakpoints) and not np.all(np.isfinite(self.breakpoints)):
            raise GraphError("breakpoints must be finite")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise GraphError("breakpoints must be strictly increasing")
        if not (np.all(np.isfinite(self.left_limits)) and np.all(np.isfinite(self.right_limits))):
            raise GraphError("one-sided limits must be finite at every breakpoint")

    # ---- Construction ----

    @classmethod
    def from_pieces(
        cls,
        pieces: Sequence[tuple[float, str | sp.Expr]],
        tail: str | sp.Expr,
        convention: Convention | str = Convention.RIGHT,
        source: str = "",
    ) -> PiecewiseGraph:
        """Build a graph from ``(upper_breakpoint, expression)`` entries plus a tail.

        Entry ``j`` covers the open interval between the previous upper
        breakpoint (or -inf) and its own; the tail covers everything above
        the last one.
        """
        uppers = [float(upper) for upper, _ in pieces]
        if any(not math.isfinite(u) for u in uppers):
            raise GraphError("piece breakpoints must be finite")
        if any(b <= a for a, b in pairwise(uppers)):
            raise GraphError(f"piece breakpoints must be strictly increasing, got {uppers}")
        exprs = [_as_expr(e) for _, e in pieces] + [_as_expr(tail)]
        lowers = [-math.inf, *uppers]
        highs = [*uppers, math.inf]

        smooth: list[tuple[float, float, sp.Expr]] = []
        for lo, hi, expr in zip(lowers, highs, exprs, strict=True):
            smooth.extend(_split_nonsmooth(expr, lo, hi))
        for lo, hi, expr in smooth:
            _require_continuous(expr, lo, hi)

        segments = tuple(Segment.build(lo, hi, expr) for lo, hi, expr in smooth)
        breakpoints = np.array([seg.upper for seg in segments[:-1]], dtype=float)
        left = np.array(
            [seg.limit(seg.upper, "-") for seg in segments[:-1]], dtype=float
        )
        right = np.array(
            [seg.limit(seg.lower, "+") for seg in segments[1:]], dtype=float
        )
        graph = cls(
            breakpoints=breakpoints,
            segments=segments,
            left_limits=left,
            right_limits=right,
            convention=Convention(convention),
            source=source or _describe(pieces, tail),
        )
        logger.debug("Built graph %r with %d breakpoints", graph.source, len(breakpoints))
        return graph

    @classmethod
    def from_expression(cls, text: str | sp.Expr, convention: Convention | str = "right") -> PiecewiseGraph:
        return cls.from_pieces([], text, convention=convention, source=str(text))

    # ---- Pointwise evaluation ----

    def eval(self, value: float) -> float:
        return float(self.eval_many(np.array([value], dtype=float))[0])

    def eval_many(self, values: np.ndarray) -> np.ndarray:
        ts = np.asarray(values, dtype=float)
        flat = ts.ravel()
        side = "right" if self.convention is Convention.RIGHT else "left"
        idx = np.searchsorted(self.breakpoints, flat, side=side)
        out = np.empty_like(flat)
        for k in np.unique(idx):
            mask = idx == k
            out[mask] = self.segments[k].func(flat[mask])
        hit, which = self._breakpoint_hits(flat)
        if hit.any():
            limits = self.right_limits if self.convention is Convention.RIGHT else self.left_limits
            out[hit] = limits[which[hit]]
        return out.reshape(ts.shape)

    def derivative_many(self, values: np.ndarray) -> np.ndarray:
        """Segment derivatives; at a breakpoint the right segment is used."""
        ts = np.asarray(values, dtype=float)
        flat = ts.ravel()
        idx = np.searchsorted(self.breakpoints, flat, side="right")
        out = np.empty_like(flat)
        for k in np.unique(idx):
            mask = idx == k
            out[mask] = self.segments[k].derivative(flat[mask])
        return out.reshape(ts.shape)

    def envelope_many(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized Chang envelope: (lower, upper) arrays."""
        ts = np.asarray(values, dtype=float)
        flat = ts.ravel()
        lo = self.eval_many(flat)
        hi = lo.copy()
        hit, which = self._breakpoint_hits(flat)
        if hit.any():
            left = self.left_limits[which[hit]]
            right = self.right_limits[which[hit]]
            lo[hit] = np.minimum(left, right)
            hi[hit] = np.maximum(left, right)
        return lo.reshape(ts.shape), hi.reshape(ts.shape)

    def _breakpoint_hits(self, flat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        left_idx = np.searchsorted(self.breakpoints, flat, side="left")
        right_idx = np.searchsorted(self.breakpoints, flat, side="right")
        return left_idx != right_idx, left_idx

    # ---- Structure ----

    @property
    def jump_heights(self) -> np.ndarray:
        return np.abs(self.right_limits - self.left_limits)

    @property
    def is_smooth(self) -> bool:
        return len(self.segments) == 1

    @property
    def expression(self) -> sp.Expr:
        """The single defining expression of a smooth graph."""
        if not self.is_smooth:
            raise GraphError(f"graph {self.source!r} has breakpoints; no single expression")
        return self.segments[0].expr

    def breakpoints_in(self, lo: float, hi: float) -> np.ndarray:
        mask = (self.breakpoints >= lo) & (self.breakpoints <= hi)
        return np.flatnonzero(mask)


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


def parse_graph(spec: str | float | Mapping[str, Any]) -> PiecewiseGraph:
    """Build a graph from a config snippet.

    ``spec`` is either a plain expression in ``t`` or a mapping with keys
    ``pieces`` (list of ``{upper, expr}``), ``tail`` and ``convention``.
    """
    if isinstance(spec, (str, int, float)):
        return PiecewiseGraph.from_expression(str(spec))
    unknown = set(spec) - {"pieces", "tail", "convention"}
    if unknown:
        raise GraphError(f"unknown graph keys: {', '.join(sorted(unknown))}")
    pieces = []
    for entry in spec.get("pieces") or []:
        try:
            pieces.append((float(entry["upper"]), entry["expr"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"graph piece needs 'upper' and 'expr': {entry!r}") from exc
    return PiecewiseGraph.from_pieces(
        pieces,
        spec.get("tail", "0"),
        convention=spec.get("convention", "right"),
    )


def one_sided_limits(g: PiecewiseGraph, value: float) -> tuple[float, float]:
    """Return (gamma(t - 0), gamma(t + 0))."""
    hit, which = g._breakpoint_hits(np.array([value], dtype=float))
    if hit[0]:
        i = int(which[0])
        return float(g.left_limits[i]), float(g.right_limits[i])
    v = g.eval(value)
    return v, v


def chang_envelope(g: PiecewiseGraph, value: float) -> Envelope:
    left, right = one_sided_limits(g, value)
    return Envelope(min(left, right), max(left, right))


def potential_many(g: PiecewiseGraph, values: np.ndarray) -> np.ndarray:
    """Primitive phi(t) = integral of gamma from 0 to t, elementwise."""
    ts = np.asarray(values, dtype=float)
    total = np.zeros_like(ts)
    for seg in g.segments:
        a = np.clip(0.0, seg.lower, seg.upper)
        b = np.clip(ts, seg.lower, seg.upper)
        total = total + seg.integral(np.full_like(ts, a), b)
    return total


def potential(g: PiecewiseGraph, value: float) -> float:
    if value == 0:
        return 0.0
    return float(potential_many(g, np.array([value], dtype=float))[0])


def clarke_dd(g: PiecewiseGraph, value: float, direction: float) -> float:
    """Clarke directional derivative of the primitive at ``value`` along ``direction``."""
    if direction == 0:
        return 0.0
    env = chang_envelope(g, value)
    return direction * (env.hi if direction > 0 else env.lo)


def clarke_dd_many(g: PiecewiseGraph, values: np.ndarray, directions: np.ndarray) -> np.ndarray:
    lo, hi = g.envelope_many(values)
    v = np.asarray(directions, dtype=float)
    return np.where(v > 0, v * hi, np.where(v < 0, v * lo, 0.0))


def product_clarke_dd(
    g1: PiecewiseGraph,
    g2: PiecewiseGraph,
    t1: float,
    t2: float,
    v1: float,
    v2: float,
) -> float:
    """Clarke derivative of the separated functional phi1(t1) + phi2(t2)."""
    return clarke_dd(g1, t1, v1) + clarke_dd(g2, t2, v2)


def directional_derivative(g: PiecewiseGraph, value: float, direction: float) -> float:
    """One-sided derivative phi'(t; v) of the primitive."""
    if direction == 0:
        return 0.0
    left, right = one_sided_limits(g, value)
    return direction * (right if direction > 0 else left)


def is_regular(g: PiecewiseGraph, value: float) -> bool:
    """True when phi'(t; .) and the Clarke derivative coincide at ``value``."""
    left, right = one_sided_limits(g, value)
    return left <= right


def windowed_envelope(
    g: PiecewiseGraph,
    centers: np.ndarray,
    radius: float,
    samples: int = WINDOW_SAMPLES,
) -> tuple[np.ndarray, np.ndarray]:
    """Envelope filled over |s - u| <= radius, for every center u.

    Sampled on ``samples`` points per window; one-sided limits at breakpoints
    inside a window are always included.  ``radius = 0`` gives the pointwise
    Chang envelope.
    """
    u = np.asarray(centers, dtype=float).ravel()
    if radius <= 0:
        return g.envelope_many(u)
    offsets = radius * np.linspace(-1.0, 1.0, samples)
    grid = u[:, None] + offsets[None, :]
    lo_s, hi_s = g.envelope_many(grid)
    lo = lo_s.min(axis=1)
    hi = hi_s.max(axis=1)
    for j, b in enumerate(g.breakpoints):
        inside = np.abs(u - b) <= radius
        if inside.any():
            lo[inside] = np.minimum(lo[inside], min(g.left_limits[j], g.right_limits[j]))
            hi[inside] = np.maximum(hi[inside], max(g.left_limits[j], g.right_limits[j]))
    return lo, hi


def window_jump(g: PiecewiseGraph, centers: np.ndarray, radius: float) -> np.ndarray:
    """Largest jump height among breakpoints with |b - u| <= radius."""
    u = np.asarray(centers, dtype=float).ravel()
    out = np.zeros_like(u)
    for j, b in enumerate(g.breakpoints):
        inside = np.abs(u - b) <= radius
        out[inside] = np.maximum(out[inside], g.jump_heights[j])
    return out


def window_lipschitz(
    g: PiecewiseGraph,
    centers: np.ndarray,
    radius: float,
    samples: int = WINDOW_SAMPLES,
) -> np.ndarray:
    """Sampled sup of |gamma'| over |s - u| <= radius."""
    u = np.asarray(centers, dtype=float).ravel()
    offsets = radius * np.linspace(-1.0, 1.0, samples)
    slopes = np.abs(g.derivative_many(u[:, None] + offsets[None, :]))
    return np.nan_to_num(slopes.max(axis=1), nan=0.0, posinf=0.0)


# ---------------------------------------------------------------------------
# Internals
# ---------------------------------------------------------------------------


def _as_expr(value: str | sp.Expr) -> sp.Expr:
    if isinstance(value, sp.Expr):
        return value
    return parse_expression(value, ("t",))


def _describe(pieces: Sequence[tuple[float, Any]], tail: Any) -> str:
    parts = [f"t<{upper:g}: {expr}" for upper, expr in pieces]
    parts.append(f"else: {tail}")
    return "; ".join(parts) if pieces else str(tail)


def _interior_point(lo: float, hi: float) -> float:
    if math.isinf(lo) and math.isinf(hi):
        return 0.0
    if math.isinf(lo):
        return hi - 1.0
    if math.isinf(hi):
        return lo + 1.0
    return 0.5 * (lo + hi)


def _open_interval(lo: float, hi: float) -> sp.Interval:
    return sp.Interval.open(
        -sp.oo if math.isinf(lo) else sp.nsimplify(lo),
        sp.oo if math.isinf(hi) else sp.nsimplify(hi),
    )


def _require_continuous(expr: sp.Expr, lo: float, hi: float) -> None:
    """Raise GraphError unless ``expr`` is finite and continuous on (lo, hi)."""
    if not expr.has(t):
        if not expr.is_finite:
            raise GraphError(f"segment value {expr} is not finite")
        return
    domain = _open_interval(lo, hi)
    try:
        covered = domain.is_subset(continuous_domain(expr, t, domain))
    except (NotImplementedError, ValueError, TypeError):
        covered = None
    if covered is None:
        covered = _samples_finite(expr, lo, hi)
    if not covered:
        raise GraphError(f"segment {expr} is not continuous on ({lo:g}, {hi:g})")


def _samples_finite(expr: sp.Expr, lo: float, hi: float) -> bool:
    a = hi - 8.0 if math.isinf(lo) else lo
    b = lo + 8.0 if math.isinf(hi) else hi
    if math.isinf(a) or math.isinf(b):
        a, b = -8.0, 8.0
    ts = np.linspace(a, b, WINDOW_SAMPLES + 2)[1:-1]
    with np.errstate(all="ignore"):
        values = np.asarray(compile_expression(expr, (t,))(ts), dtype=float)
    return bool(np.all(np.isfinite(values)))


def _real_zeros(arg: sp.Expr, lo: float, hi: float) -> list[float]:
    domain = _open_interval(lo, hi)
    try:
        zeros = sp.solveset(arg, t, domain=domain)
    except (NotImplementedError, ValueError, TypeError) as exc:
        raise GraphError(f"cannot locate zeros of {arg} on ({lo}, {hi})") from exc
    if zeros is sp.S.EmptySet:
        return []
    if isinstance(zeros, sp.FiniteSet):
        return sorted(float(z) for z in zeros)
    raise GraphError(f"zeros of {arg} on ({lo}, {hi}) are not finitely many: {zeros}")


def _split_nonsmooth(expr: sp.Expr, lo: float, hi: float) -> list[tuple[float, float, sp.Expr]]:
    """Split (lo, hi) at zeros of sign/abs arguments and resolve them."""
    inner = [
        atom
        for atom in expr.atoms(sp.sign, sp.Abs)
        if not atom.args[0].has(sp.sign, sp.Abs)
    ]
    if not inner:
        return [(lo, hi, expr)]

    cuts: set[float] = set()
    for atom in inner:
        if atom.args[0].has(t):
            cuts.update(z for z in _real_zeros(atom.args[0], lo, hi) if lo < z < hi)
    edges = [lo, *sorted(cuts), hi]

    pieces: list[tuple[float, float, sp.Expr]] = []
    for a, b in pairwise(edges):
        mid = _interior_point(a, b)
        replacements = {}
        for atom in inner:
            arg = atom.args[0]
            sgn = float(np.sign(float(arg.subs(t, mid))))
            if isinstance(atom, sp.sign):
                replacements[atom] = sp.Integer(int(sgn))
            else:
                replacements[atom] = arg if sgn >= 0 else -arg
        pieces.extend(_split_nonsmooth(expr.xreplace(replacements), a, b))
    return pieces
