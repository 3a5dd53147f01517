"""Result files and terminal summaries."""

from wentzell.reporting.formatters import (
    format_energy_summary,
    format_study_summary,
    format_verdict_table,
)
from wentzell.reporting.payloads import solve_payload, study_payload
from wentzell.reporting.writers import ResultWriter, to_jsonable

__all__ = [
    "ResultWriter",
    "format_energy_summary",
    "format_study_summary",
    "format_verdict_table",
    "solve_payload",
    "study_payload",
    "to_jsonable",
]
