"""Plain-text verdict tables and summaries for the terminal."""

from __future__ import annotations

import math

from wentzell.models import EnergyReport
from wentzell.solver.study import StudyReport

Row = tuple[str, bool, str]


def _fmt(value: float | None) -> str:
    if value is None or math.isnan(value):
        return "-"
    return f"{value:.6g}"


def format_verdict_table(rows: list[Row], title: str = "") -> str:
    """Aligned table of (check, verdict, detail) rows."""
    width = max((len(name) for name, _, _ in rows), default=5)
    lines = [title] if title else []
    lines.append(f"{'check'.ljust(width)}  verdict  detail")
    lines.append(f"{'-' * width}  -------  ------")
    for name, ok, detail in rows:
        lines.append(f"{name.ljust(width)}  {'ok' if ok else 'FAIL':7}  {detail}")
    return "\n".join(lines)


def format_energy_summary(report: EnergyReport) -> str:
    passed = sum(report.step_pass)
    lines = [
        f"Energy inequality: {passed}/{len(report.step_pass)} steps pass "
        f"(worst {report.worst_violation:+.3e} at step {report.worst_step})",
        f"Coercivity certificate: {'ok' if report.coercivity_ok else 'FAIL'} "
        f"(worst gap {report.worst_coercivity_gap:+.3e})",
        f"Integrated inequality: {'ok' if report.integrated_ok else 'FAIL'}",
    ]
    if report.bound is not None:
        b = report.bound
        lines.append(
            f"A priori bound: X*={_fmt(b.x_star)} observed={_fmt(b.observed_x)} "
            f"max|U|^2={_fmt(b.observed_max_state_sq)} <= {_fmt(b.state_bound_sq)} "
            f"[{'ok' if b.ok else 'FAIL'}]"
        )
    return "\n".join(lines)


def format_study_summary(report: StudyReport) -> str:
    """One line per level plus differences, rates and the overall verdict."""
    lines = ["level  h          dt         eps        energy  inclusion  hvi_min      C_obs      error"]
    for o in report.levels:
        lines.append(
            f"{o.level:<5}  {o.mesh_size:<9.4g}  {o.dt:<9.4g}  {o.eps:<9.4g}  "
            f"{'ok' if o.energy.ok else 'FAIL':6}  {o.inclusion.fraction_inside:<9.4f}  "
            f"{o.hvi.min_residual:<+11.3e}  {o.apriori.c_observed:<9.4g}  "
            f"{_fmt(o.error) if o.error is not None else '-'}"
        )
    lines.append("differences: " + ", ".join(f"{d:.3e}" for d in report.differences))
    lines.append("difference rates: " + ", ".join(_fmt(r) for r in report.difference_rates))
    if report.errors:
        lines.append("error rates: " + ", ".join(_fmt(r) for r in report.error_rates))
    lines.append(f"a priori constant ratio: {_fmt(report.apriori.ratio)}")
    for flag in report.flags:
        lines.append(f"flag: {flag}")
    lines.append(f"verdict: {'ok' if report.ok else 'FAIL'}")
    return "\n".join(lines)
