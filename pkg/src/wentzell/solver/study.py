"""Joint refinement study: mesh, time step and eps refined together, with all checks per level."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy import sparse

from wentzell.config import ProblemConfig
from wentzell.errors import DomainError
from wentzell.fem.assembly import BoundaryCoefficient, assemble
from wentzell.fem.mesh import Mesh, build_mesh, refine_mesh
from wentzell.logging_config import run_context
from wentzell.models import (
    AprioriReport,
    AprioriStudyVerdict,
    EnergyReport,
    EpsSchedule,
    HviReport,
    InclusionReport,
    SmallnessVerdict,
    Trajectory,
)
from wentzell.solver.problem import build_solve_config, domain_spec
from wentzell.solver.runner import solve
from wentzell.verify.apriori import apriori_check, apriori_study_verdict
from wentzell.verify.energy import energy_check
from wentzell.verify.hvi import hvi_residual
from wentzell.verify.inclusion import default_tolerance, inclusion_check

logger = logging.getLogger(__name__)

CONSTANT_EPS_FLAG = "eps schedule is constant: reactions converge to gamma_eps(u), not to the envelope"


@dataclass(frozen=True, eq=False)
class LevelOutcome:
    """One level of a study: the run and every check on it."""

    level: int
    mesh_size: float
    dt: float
    eps: float
    n_vertices: int
    trajectory: Trajectory
    energy: EnergyReport
    inclusion: InclusionReport
    hvi: HviReport
    apriori: AprioriReport
    smallness: SmallnessVerdict | None
    error: float | None

    @property
    def n_steps(self) -> int:
        return self.trajectory.n_steps


@dataclass(frozen=True, eq=False)
class StudyReport:
    levels: tuple[LevelOutcome, ...]
    differences: tuple[float, ...]
    difference_rates: tuple[float, ...]
    errors: tuple[float, ...]
    error_rates: tuple[float, ...]
    inclusion_fractions: tuple[float, ...]
    inclusion_nondecreasing: bool
    hvi_minima: tuple[float, ...]
    apriori: AprioriStudyVerdict
    flags: tuple[str, ...]
    ok: bool


def run_level(problem: ProblemConfig, level: int) -> LevelOutcome:
    """Solve refinement level ``level`` of ``problem`` and run every check on it.

    Self-contained so that it can run in a worker process.
    """
    with run_context(study_level=level):
        return _solve_and_check(problem, level)


def _solve_and_check(problem: ProblemConfig, level: int) -> LevelOutcome:
    config = build_solve_config(problem, level)
    ops = config.assemble()
    traj, ledger = solve(config, ops)
    checks = problem.checks

    energy = energy_check(traj, ledger, checks.energy_tol)
    tolerance = partial(default_tolerance, factor=checks.inclusion_factor)
    inclusion = inclusion_check(traj, config.gamma1, config.gamma2, config.eps, tolerance)
    hvi = hvi_residual(
        traj,
        ops,
        config.gamma1,
        config.gamma2,
        seed=problem.seed + level,
        n_tests=checks.hvi_test_functions,
        factor=checks.hvi_factor,
    )
    error = None
    if config.exact is not None:
        error = math.sqrt(float(np.sum(ledger.dt[1:] * ledger.error_h[1:] ** 2)))
    logger.info(
        "Level %d: h=%.4g dt=%.4g eps=%.4g energy=%s inclusion=%.4f hvi=%.3e",
        level,
        ops.mesh.size,
        config.step_size,
        config.eps,
        energy.ok,
        inclusion.fraction_inside,
        hvi.min_residual,
    )
    return LevelOutcome(
        level=level,
        mesh_size=ops.mesh.size,
        dt=config.step_size,
        eps=config.eps,
        n_vertices=ops.size,
        trajectory=traj,
        energy=energy,
        inclusion=inclusion,
        hvi=hvi,
        apriori=apriori_check(ledger),
        smallness=ledger.smallness,
        error=error,
    )


def refine_study(problem: ProblemConfig, levels: int, workers: int = 1) -> StudyReport:
    """Run ``levels`` nested levels and compare successive ones.

    Differences are discrete L2(0,T;H) norms on the finer level of the
    prolonged, linearly time-interpolated coarse solution minus the fine one.
    """
    if levels < 2:
        raise DomainError(f"a refinement study needs at least 2 levels, got {levels}")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_level, [problem] * levels, range(levels)))
    else:
        outcomes = [run_level(problem, m) for m in range(levels)]

    a_field = build_solve_config(problem, 0).a_field
    mesh = build_mesh(domain_spec(problem), problem.mesh_level)
    differences = []
    for coarse, fine in zip(outcomes, outcomes[1:], strict=False):
        fine_mesh, P = refine_mesh(mesh)
        differences.append(_difference(coarse.trajectory, fine.trajectory, fine_mesh, P, a_field))
        mesh = fine_mesh

    errors = tuple(o.error for o in outcomes if o.error is not None)
    fractions = tuple(o.inclusion.fraction_inside for o in outcomes)
    flags = []
    if problem.regularization.schedule == EpsSchedule.CONSTANT.value:
        flags.append(CONSTANT_EPS_FLAG)
        logger.warning(CONSTANT_EPS_FLAG)
    apriori = apriori_study_verdict([o.apriori for o in outcomes], problem.checks.apriori_max_ratio)
    nondecreasing = all(b >= a - 1e-12 for a, b in zip(fractions, fractions[1:], strict=False))
    finest_ok = fractions[-1] >= problem.checks.inclusion_min_fraction
    ok = (
        all(o.energy.ok and o.hvi.ok for o in outcomes)
        and apriori.ok
        and finest_ok
        and nondecreasing
    )
    report = StudyReport(
        levels=tuple(outcomes),
        differences=tuple(differences),
        difference_rates=observed_rates(differences),
        errors=errors,
        error_rates=observed_rates(errors),
        inclusion_fractions=fractions,
        inclusion_nondecreasing=nondecreasing,
        hvi_minima=tuple(o.hvi.min_residual for o in outcomes),
        apriori=apriori,
        flags=tuple(flags),
        ok=ok,
    )
    logger.info(
        "Study: differences=%s rates=%s errors=%s ok=%s",
        [f"{d:.3e}" for d in differences],
        [f"{r:.3f}" for r in report.difference_rates],
        [f"{e:.3e}" for e in errors],
        ok,
    )
    return report


def observed_rates(values: tuple[float, ...] | list[float]) -> tuple[float, ...]:
    """log2 of successive ratios; nan where a value is zero."""
    rates = []
    for a, b in zip(values, values[1:], strict=False):
        rates.append(math.log2(a / b) if a > 0 and b > 0 else math.nan)
    return tuple(rates)


def interpolate_in_time(traj: Trajectory, times: np.ndarray) -> np.ndarray:
    """Piecewise-linear interpolation of the states at ``times`` (rows)."""
    tc = traj.times
    idx = np.clip(np.searchsorted(tc, times, side="right") - 1, 0, len(tc) - 2)
    w = (times - tc[idx]) / (tc[idx + 1] - tc[idx])
    return (1.0 - w)[:, None] * traj.states[idx] + w[:, None] * traj.states[idx + 1]


def _difference(
    coarse: Trajectory,
    fine: Trajectory,
    fine_mesh: Mesh,
    P: sparse.csr_matrix,
    a_field: BoundaryCoefficient,
) -> float:
    ops = assemble(fine_mesh, a_field, coercivity=False)
    coarse_at_fine = (P @ interpolate_in_time(coarse, fine.times).T).T
    D = fine.states - coarse_at_fine
    energies = np.einsum("ij,ij->i", D, (ops.mass_h @ D.T).T)
    return math.sqrt(float(np.sum(fine.dt[1:] * np.maximum(energies[1:], 0.0))))
