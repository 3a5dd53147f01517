"""Shared domain models: envelopes, growth data, trajectories, ledgers and check reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import pandas as pd

from wentzell.errors import DomainError


# ---- Enums ----


class Convention(str, Enum):
    """Which one-sided limit pointwise evaluation returns at a breakpoint."""

    LEFT = "left"
    RIGHT = "right"


class EpsSchedule(str, Enum):
    GEOMETRIC = "geometric"
    CONSTANT = "constant"


# ---- Graph values ----


@dataclass(frozen=True)
class Envelope:
    """Closed interval [lo, hi] filling a jump of a locally bounded function."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo <= self.hi:
            raise DomainError(f"envelope needs lo <= hi, got [{self.lo}, {self.hi}]")

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    def distance(self, value: float) -> float:
        return max(self.lo - value, value - self.hi, 0.0)

    def widen(self, delta: float) -> Envelope:
        return Envelope(self.lo - delta, self.hi + delta)


@dataclass(frozen=True)
class GrowthParams:
    """Growth constants |gamma(t)| <= c (1 + |t|^theta), plus the sign constant d."""

    c: float
    theta: float
    d: float | None = None

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise DomainError(f"growth constant c must be positive, got {self.c}")
        if not 0.0 <= self.theta <= 1.0:
            raise DomainError(f"growth exponent theta must lie in [0, 1], got {self.theta}")
        if self.d is not None and self.d < 0:
            raise DomainError(f"sign constant d must be nonnegative, got {self.d}")


# ---- Hypothesis reports ----


@dataclass(frozen=True)
class GrowthReport:
    ok: bool
    worst_ratio: float
    worst_t: float
    hypothesis: str = "H(gamma) growth"


@dataclass(frozen=True)
class SignConditionReport:
    ok: bool
    worst_excess: float
    worst_t: float
    hypothesis: str = "H(phi) sign condition"


@dataclass(frozen=True)
class RauchReport:
    """Sampled Rauch-type alternative to the growth condition."""

    ok: bool
    radius: float
    hypothesis: str = "Rauch condition"


@dataclass(frozen=True)
class SmallnessVerdict:
    """Which case of the existence theorem applies and whether its condition holds."""

    case: int | None
    ok: bool
    margin: float
    condition: str


# ---- Time integration results ----


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States and mollified reactions of one backward Euler run.

    Row ``n`` of every array belongs to ``times[n]``; row 0 holds the
    projected initial datum.  ``reaction_gamma`` is indexed by
    ``boundary_vertices``.
    """

    times: np.ndarray
    states: np.ndarray
    reaction_omega: np.ndarray
    reaction_gamma: np.ndarray
    loads: np.ndarray
    boundary_vertices: np.ndarray
    newton_iterations: np.ndarray
    newton_residuals: np.ndarray
    eps: float
    mesh_size: float

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    @property
    def dt(self) -> np.ndarray:
        """Step sizes, with a leading zero so that ``dt[n] = times[n] - times[n-1]``."""
        return np.concatenate([[0.0], np.diff(self.times)])

    @property
    def traces(self) -> np.ndarray:
        """Boundary values, aligned with ``reaction_gamma``."""
        return self.states[:, self.boundary_vertices]

    def to_frame(self) -> pd.DataFrame:
        columns = {"time": self.times}
        for i in range(self.states.shape[1]):
            columns[f"u_{i}"] = self.states[:, i]
        frame = pd.DataFrame(columns)
        frame.index.name = "step"
        return frame


@dataclass(frozen=True)
class LedgerConstants:
    a1: float
    a1p: float
    a2: float
    a2p: float


@dataclass(frozen=True, eq=False)
class EnergyLedger:
    """Per-step terms of the discrete energy inequality plus the derived constants.

    Pairings ``reaction_omega``/``reaction_gamma`` are the lumped products
    <xi_k, u>, ``rho`` is dt |r . U| for the Newton residual r and
    ``derivative_dual_norm`` is the discrete dual norm of U'.
    """

    times: np.ndarray
    dt: np.ndarray
    h_norm_sq: np.ndarray
    v_norm_sq: np.ndarray
    operator_energy: np.ndarray
    load_dual_norm: np.ndarray
    reaction_omega: np.ndarray
    reaction_gamma: np.ndarray
    rho: np.ndarray
    newton_iterations: np.ndarray
    newton_residual: np.ndarray
    derivative_dual_norm: np.ndarray
    xi_omega_norm_sq: np.ndarray
    xi_gamma_norm_sq: np.ndarray
    error_h: np.ndarray
    coercivity: float
    kappa_omega: float
    kappa_gamma: float
    measure_omega: float
    measure_gamma: float
    eps: float
    growth1: GrowthParams | None = None
    growth2: GrowthParams | None = None
    smallness: SmallnessVerdict | None = field(default=None)

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    @property
    def has_growth(self) -> bool:
        return self.growth1 is not None and self.growth2 is not None

    def with_coercivity(self, value: float) -> EnergyLedger:
        return replace(self, coercivity=value)

    def constants(self, t: float | None = None) -> LedgerConstants:
        """Return a1, a1', a2, a2' at time ``t`` (default: final time).

        Both terms carry the windowed enlargement (1 + eps^theta) of the
        mollified growth bound.
        """
        if self.growth1 is None or self.growth2 is None:
            nan = math.nan
            return LedgerConstants(nan, nan, nan, nan)
        t = self.final_time if t is None else t
        a1, a1p = _growth_constants(self.growth1, t, self.measure_omega, self.eps)
        a2, a2p = _growth_constants(self.growth2, t, self.measure_gamma, self.eps)
        return LedgerConstants(a1, a1p, a2, a2p)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            {
                "time": self.times,
                "dt": self.dt,
                "h_norm_sq": self.h_norm_sq,
                "v_norm_sq": self.v_norm_sq,
                "operator_energy": self.operator_energy,
                "load_dual_norm": self.load_dual_norm,
                "reaction_omega": self.reaction_omega,
                "reaction_gamma": self.reaction_gamma,
                "rho": self.rho,
                "newton_iterations": self.newton_iterations,
                "newton_residual": self.newton_residual,
                "derivative_dual_norm": self.derivative_dual_norm,
                "xi_omega_norm_sq": self.xi_omega_norm_sq,
                "xi_gamma_norm_sq": self.xi_gamma_norm_sq,
                "error_h": self.error_h,
            }
        )
        frame.index.name = "step"
        return frame


def _growth_constants(
    growth: GrowthParams, t: float, measure: float, eps: float
) -> tuple[float, float]:
    theta = growth.theta
    widened = growth.c * (1.0 + eps**theta)
    a = widened * math.sqrt(2.0 * t * measure)
    ap = widened * math.sqrt(2.0 * measure ** (1.0 - theta) * t ** (1.0 - theta))
    return a, ap


# ---- Verification reports ----


@dataclass(frozen=True)
class AprioriBound:
    """Closed-form bound from the integrated energy inequality."""

    x_star: float
    state_bound_sq: float
    observed_x: float
    observed_max_state_sq: float
    ok: bool


@dataclass(frozen=True)
class ReactionGrowthReport:
    ok: bool
    omega_norm: float
    omega_bound: float
    gamma_norm: float
    gamma_bound: float


@dataclass(frozen=True)
class EnergyReport:
    ok: bool
    step_pass: tuple[bool, ...]
    worst_violation: float
    worst_step: int
    coercivity_ok: bool
    worst_coercivity_gap: float
    integrated_ok: bool
    worst_integrated_violation: float
    bound: AprioriBound | None = None
    reaction_growth: ReactionGrowthReport | None = None


@dataclass(frozen=True)
class AprioriReport:
    c_observed: float
    v_norm: float
    derivative_norm: float
    u0_norm: float
    f_norm: float


@dataclass(frozen=True)
class AprioriStudyVerdict:
    ok: bool
    ratio: float
    constants: tuple[float, ...]


@dataclass(frozen=True)
class InclusionReport:
    """Distances of stored reactions to the Chang envelope.

    The primary figures use the envelope filled over the mollification
    window |s - u| <= eps; ``pointwise_*`` use the envelope at u itself.
    """

    fraction_inside: float
    worst_distance: float
    worst_step: int
    worst_node: int
    pointwise_fraction: float
    pointwise_worst: float
    n_checked: int


@dataclass(frozen=True)
class HviReport:
    ok: bool
    min_residual: float
    tolerance: float
    worst_step: int
    zero_direction_max: float
    n_tests: int
