"""Backward Euler integration of the regularized Galerkin system and refinement studies."""

from wentzell.solver.manufactured import manufactured_sources
from wentzell.solver.nemytskii import nemytskii, reaction_jacobian, reactions
from wentzell.solver.problem import SolveConfig, SourceTerm, build_solve_config
from wentzell.solver.runner import build_ledger, solve
from wentzell.solver.stepper import StepResult, load_vector, project_initial, step
from wentzell.solver.study import LevelOutcome, StudyReport, refine_study, run_level

__all__ = [
    "LevelOutcome",
    "SolveConfig",
    "SourceTerm",
    "StepResult",
    "StudyReport",
    "build_ledger",
    "build_solve_config",
    "load_vector",
    "manufactured_sources",
    "nemytskii",
    "project_initial",
    "reaction_jacobian",
    "reactions",
    "refine_study",
    "run_level",
    "solve",
    "step",
]
