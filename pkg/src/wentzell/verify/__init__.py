"""Executable checks of the existence theory on computed trajectories."""

from wentzell.verify.apriori import apriori_check, apriori_study_verdict
from wentzell.verify.energy import apriori_bound, energy_check, reaction_growth_check
from wentzell.verify.hvi import direction_battery, hvi_residual
from wentzell.verify.inclusion import default_tolerance, inclusion_check
from wentzell.verify.smallness import smallness_check, smallness_threshold

__all__ = [
    "apriori_bound",
    "apriori_check",
    "apriori_study_verdict",
    "default_tolerance",
    "direction_battery",
    "energy_check",
    "hvi_residual",
    "inclusion_check",
    "reaction_growth_check",
    "smallness_check",
    "smallness_threshold",
]
