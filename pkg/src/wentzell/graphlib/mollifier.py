"""Mollifier kernels and the convolution gamma_eps = p_eps * gamma.

The convolution over [xi - eps, xi + eps] is rewritten on the reference
window [-1, 1] and integrated with Gauss-Legendre rules, one per smooth
subinterval after splitting at the images of the breakpoints.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from itertools import pairwise

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from wentzell.constants import MOLLIFIER_NODES, MOLLIFIER_NORMALIZATION_TOL
from wentzell.errors import DomainError
from wentzell.graphlib.graph import PiecewiseGraph

Profile = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# Standard bump
# ---------------------------------------------------------------------------


def bump_profile(x: np.ndarray) -> np.ndarray:
    """exp(-1 / (1 - x^2)) on (-1, 1), zero elsewhere."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


def bump_derivative(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(-1.0 / (1.0 - xi**2)) * (-2.0 * xi / (1.0 - xi**2) ** 2)
    return out


# ---------------------------------------------------------------------------
# Kernel
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MollifierKernel:
    """Smooth nonnegative unit-mass kernel supported in [-1, 1].

    ``profile`` is the unnormalized shape; ``mass`` its integral.  The
    reference Gauss rule is renormalized so that a window without
    breakpoints reproduces constants exactly.
    """

    name: str
    profile: Profile
    profile_derivative: Profile
    mass: float
    nodes: np.ndarray
    weights: np.ndarray
    rule_mass: float

    @classmethod
    def from_profile(
        cls,
        profile: Profile,
        derivative: Profile,
        name: str = "custom",
        n_nodes: int = MOLLIFIER_NODES,
    ) -> MollifierKernel:
        grid = np.linspace(-1.5, 1.5, 3001)
        values = profile(grid)
        if np.any(values < 0):
            raise DomainError(f"kernel {name!r} takes negative values")
        if np.any(values[np.abs(grid) >= 1.0] != 0):
            raise DomainError(f"kernel {name!r} is not supported in [-1, 1]")
        mass = integrate.quad(
            lambda s: float(profile(np.array([s]))[0]), -1.0, 1.0, epsabs=1e-15, epsrel=1e-14, limit=200
        )[0]
        if not mass > 0:
            raise DomainError(f"kernel {name!r} has zero mass")
        nodes, weights = leggauss(n_nodes)
        rule_mass = float(np.dot(weights, profile(nodes)))
        if abs(rule_mass / mass - 1.0) > 1e-9:
            raise DomainError(f"{n_nodes}-point rule does not resolve kernel {name!r}")
        return cls(name, profile, derivative, mass, nodes, weights, rule_mass)

    @classmethod
    def bump(cls, n_nodes: int = MOLLIFIER_NODES) -> MollifierKernel:
        return cls.from_profile(bump_profile, bump_derivative, name="bump", n_nodes=n_nodes)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.profile(np.asarray(x, dtype=float)) / self.mass

    def scaled(self, x: np.ndarray, eps: float) -> np.ndarray:
        """p_eps(x) = p(x / eps) / eps."""
        return self(np.asarray(x, dtype=float) / eps) / eps

    def total_mass(self) -> float:
        """Integral of the normalized kernel, by adaptive quadrature."""
        return integrate.quad(
            lambda s: float(self(np.array([s]))[0]), -1.0, 1.0, epsabs=1e-15, epsrel=1e-14, limit=200
        )[0]

    def is_normalized(self) -> bool:
        return abs(self.total_mass() - 1.0) <= MOLLIFIER_NORMALIZATION_TOL


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


def mollify_many(
    g: PiecewiseGraph, kernel: MollifierKernel, eps: float, xi: np.ndarray
) -> np.ndarray:
    """gamma_eps at every entry of ``xi``."""
    _check_eps(eps)
    values = np.asarray(xi, dtype=float)
    out = _convolve(g, kernel, eps, values.ravel(), kernel.profile) / kernel.rule_mass
    return out.reshape(values.shape)


def mollify(g: PiecewiseGraph, kernel: MollifierKernel, eps: float, xi: float) -> float:
    return float(mollify_many(g, kernel, eps, np.array([xi], dtype=float))[0])


def mollify_derivative_many(
    g: PiecewiseGraph, kernel: MollifierKernel, eps: float, xi: np.ndarray
) -> np.ndarray:
    """gamma_eps' by differentiating the kernel under the integral."""
    _check_eps(eps)
    values = np.asarray(xi, dtype=float)
    raw = _convolve(g, kernel, eps, values.ravel(), kernel.profile_derivative)
    return (raw / (eps * kernel.rule_mass)).reshape(values.shape)


def mollify_derivative(g: PiecewiseGraph, kernel: MollifierKernel, eps: float, xi: float) -> float:
    return float(mollify_derivative_many(g, kernel, eps, np.array([xi], dtype=float))[0])


# ---------------------------------------------------------------------------
# Internals
# ---------------------------------------------------------------------------


def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise DomainError(f"mollification radius must be positive, got {eps}")


def _convolve(
    g: PiecewiseGraph,
    kernel: MollifierKernel,
    eps: float,
    xi: np.ndarray,
    weight: Profile,
) -> np.ndarray:
    """Integral over [-1, 1] of weight(x) * gamma(xi - eps x) dx, for every xi."""
    bps = g.breakpoints
    first = np.searchsorted(bps, xi - eps, side="right")
    last = np.searchsorted(bps, xi + eps, side="left")
    clean = first == last
    out = np.empty_like(xi)

    if clean.any():
        reference = kernel.weights * weight(kernel.nodes)
        samples = xi[clean, None] - eps * kernel.nodes[None, :]
        out[clean] = g.eval_many(samples) @ reference

    for i in np.flatnonzero(~clean):
        cuts = (xi[i] - bps[first[i] : last[i]]) / eps
        edges = np.concatenate([[-1.0], np.sort(cuts), [1.0]])
        total = 0.0
        for a, b in pairwise(edges):
            half = 0.5 * (b - a)
            x = 0.5 * (a + b) + half * kernel.nodes
            total += half * float(np.dot(kernel.weights * weight(x), g.eval_many(xi[i] - eps * x)))
        out[i] = total
    return out
