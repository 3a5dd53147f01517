"""JSON report bodies for solve and study runs."""

from __future__ import annotations

from typing import Any

from wentzell.models import EnergyLedger, EnergyReport, Trajectory
from wentzell.solver.problem import SolveConfig
from wentzell.solver.study import LevelOutcome, StudyReport


def _config_block(config: SolveConfig, ledger: EnergyLedger) -> dict[str, Any]:
    return {
        "mesh_level": config.mesh_level,
        "T": config.T,
        "dt": config.step_size,
        "n_steps": config.n_steps,
        "eps": config.eps,
        "schedule": config.schedule,
        "gamma1": config.gamma1.source,
        "gamma2": config.gamma2.source,
        "coercivity": ledger.coercivity,
        "kappa_omega": ledger.kappa_omega,
        "kappa_gamma": ledger.kappa_gamma,
        "measure_omega": ledger.measure_omega,
        "measure_gamma": ledger.measure_gamma,
    }


def solve_payload(
    name: str,
    config: SolveConfig,
    traj: Trajectory,
    ledger: EnergyLedger,
    energy: EnergyReport,
    status: int,
) -> dict[str, Any]:
    errors = ledger.error_h
    return {
        "command": "solve",
        "problem": name,
        "status": status,
        "config": _config_block(config, ledger),
        "mesh_size": traj.mesh_size,
        "n_vertices": int(traj.states.shape[1]),
        "newton_max_iterations": int(traj.newton_iterations.max()),
        "smallness": ledger.smallness,
        "constants": ledger.constants() if ledger.has_growth else None,
        "energy": {
            "ok": energy.ok,
            "steps_passed": int(sum(energy.step_pass)),
            "n_steps": len(energy.step_pass),
            "worst_violation": energy.worst_violation,
            "worst_step": energy.worst_step,
            "coercivity_ok": energy.coercivity_ok,
            "worst_coercivity_gap": energy.worst_coercivity_gap,
            "integrated_ok": energy.integrated_ok,
            "worst_integrated_violation": energy.worst_integrated_violation,
            "bound": energy.bound,
            "reaction_growth": energy.reaction_growth,
        },
        "final_error_h": None if config.exact is None else float(errors[-1]),
    }


def _level_block(outcome: LevelOutcome) -> dict[str, Any]:
    energy = outcome.energy
    return {
        "level": outcome.level,
        "mesh_size": outcome.mesh_size,
        "dt": outcome.dt,
        "eps": outcome.eps,
        "n_vertices": outcome.n_vertices,
        "n_steps": outcome.n_steps,
        "energy": {
            "ok": energy.ok,
            "worst_violation": energy.worst_violation,
            "worst_step": energy.worst_step,
            "bound": energy.bound,
        },
        "inclusion": outcome.inclusion,
        "hvi": outcome.hvi,
        "apriori": outcome.apriori,
        "smallness": outcome.smallness,
        "error": outcome.error,
    }


def study_payload(name: str, report: StudyReport, status: int) -> dict[str, Any]:
    return {
        "command": "study",
        "problem": name,
        "status": status,
        "ok": report.ok,
        "levels": [_level_block(o) for o in report.levels],
        "differences": report.differences,
        "difference_rates": report.difference_rates,
        "errors": report.errors,
        "error_rates": report.error_rates,
        "inclusion_fractions": report.inclusion_fractions,
        "inclusion_nondecreasing": report.inclusion_nondecreasing,
        "hvi_minima": report.hvi_minima,
        "apriori": report.apriori,
        "flags": report.flags,
    }
