"""Unit tests for wentzell.verify.apriori."""

from __future__ import annotations

import math

import pytest

from wentzell.models import AprioriReport
from wentzell.solver.runner import solve
from wentzell.verify.apriori import apriori_check, apriori_study_verdict


def _make_report(c: float) -> AprioriReport:
    return AprioriReport(c_observed=c, v_norm=c, derivative_norm=0.0, u0_norm=0.0, f_norm=0.0)


class TestAprioriCheck:
    def test_zero_run(self, make_config):
        _, ledger = solve(make_config())
        report = apriori_check(ledger)
        assert report.c_observed == 0.0
        assert report.u0_norm == 0.0

    def test_constant_from_norms(self, make_config):
        _, ledger = solve(make_config(u0="cos(pi*x)", f1="1", T=0.3))
        report = apriori_check(ledger)
        expected = (report.v_norm + report.derivative_norm) / (1.0 + report.u0_norm + report.f_norm)
        assert report.c_observed == pytest.approx(expected)
        assert report.u0_norm == pytest.approx(math.sqrt(ledger.h_norm_sq[0]))
        assert report.f_norm > 0

    def test_explicit_data_norms(self, make_config):
        _, ledger = solve(make_config(u0="x"))
        report = apriori_check(ledger, U0_norm=1.0, f_dual_norm=2.0)
        assert report.c_observed == pytest.approx((report.v_norm + report.derivative_norm) / 4.0)


class TestStudyVerdict:
    def test_stable_constants(self):
        verdict = apriori_study_verdict([_make_report(1.0), _make_report(2.0), _make_report(1.5)])
        assert verdict.ok
        assert verdict.ratio == pytest.approx(2.0)
        assert verdict.constants == (1.0, 2.0, 1.5)

    def test_growing_constants(self):
        verdict = apriori_study_verdict([_make_report(1.0), _make_report(5.0)])
        assert not verdict.ok

    def test_custom_ratio(self):
        assert apriori_study_verdict([_make_report(1.0), _make_report(5.0)], max_ratio=6.0).ok

    def test_zero_constants_pass(self):
        verdict = apriori_study_verdict([_make_report(0.0), _make_report(0.0)])
        assert verdict.ok
        assert verdict.ratio == 1.0

    def test_one_zero_constant_fails(self):
        verdict = apriori_study_verdict([_make_report(0.0), _make_report(1.0)])
        assert not verdict.ok
        assert math.isinf(verdict.ratio)
