"""Unit tests for wentzell.graphlib.hypotheses."""

from __future__ import annotations

import math

import numpy as np
import pytest

from wentzell.errors import DomainError
from wentzell.graphlib.graph import PiecewiseGraph
from wentzell.graphlib.hypotheses import (
    check_gradient_growth,
    check_growth,
    check_rauch_condition,
    check_sign_condition,
    growth_bound,
)
from wentzell.models import GrowthParams


class TestGrowthBound:
    def test_power_vanishes_at_zero(self):
        np.testing.assert_allclose(growth_bound(np.array([0.0, 2.0]), 1.0, 0.0), [1.0, 2.0])

    def test_linear(self):
        np.testing.assert_allclose(growth_bound(np.array([-3.0, 4.0]), 0.5, 1.0), [2.0, 2.5])


class TestGrowth:
    def test_heaviside_tight_at_jump(self, heaviside):
        report = check_growth(heaviside, GrowthParams(1.0, 0.0))
        assert report.ok
        assert report.worst_ratio == pytest.approx(1.0)
        assert report.worst_t == 0.0

    def test_quadratic_fails_linear_growth(self):
        g = PiecewiseGraph.from_expression("t**2")
        report = check_growth(g, GrowthParams(1.0, 1.0))
        assert not report.ok
        assert abs(report.worst_t) == pytest.approx(10.0)
        assert report.worst_ratio == pytest.approx(100.0 / 11.0)

    def test_custom_interval(self):
        g = PiecewiseGraph.from_expression("t**2")
        assert check_growth(g, GrowthParams(1.0, 1.0), interval=(-1.0, 1.0), n=101).ok

    def test_empty_interval_rejected(self, heaviside):
        with pytest.raises(DomainError, match="bounded interval"):
            check_growth(heaviside, GrowthParams(1.0, 0.0), interval=(1.0, -1.0))

    def test_too_few_samples_rejected(self, heaviside):
        with pytest.raises(DomainError, match="at least 2"):
            check_growth(heaviside, GrowthParams(1.0, 0.0), n=1)


class TestSignCondition:
    def test_heaviside_with_zero_constant(self, heaviside):
        report = check_sign_condition(heaviside, 0.0)
        assert report.ok
        assert report.worst_excess == pytest.approx(0.0)

    def test_monotone_graph_passes(self, sign_graph):
        assert check_sign_condition(sign_graph, 0.0).ok

    def test_decreasing_graph_fails(self):
        g = PiecewiseGraph.from_expression("-t")
        report = check_sign_condition(g, 0.0)
        assert not report.ok
        assert report.worst_excess == pytest.approx(100.0)

    def test_constant_d_absorbs_linear_excess(self):
        g = PiecewiseGraph.from_expression("-1")
        # phi°(t; -t) = t for t > 0, below d (1 + |t|) only for d >= 1
        assert not check_sign_condition(g, 0.5).ok
        assert check_sign_condition(g, 1.0).ok

    def test_negative_d_rejected(self, heaviside):
        with pytest.raises(DomainError, match="nonnegative"):
            check_sign_condition(heaviside, -1.0)


class TestGradientGrowth:
    def test_bounded_graphs(self, heaviside, sign_graph):
        report = check_gradient_growth(heaviside, sign_graph, 2.0)
        assert report.ok
        assert report.hypothesis == "H(phi) gradient growth"
        assert report.worst_ratio <= 1.0

    def test_superlinear_graph_fails(self):
        g = PiecewiseGraph.from_expression("t**2")
        assert not check_gradient_growth(g, g, 1.0, n=41).ok

    def test_nonpositive_constant_rejected(self, heaviside):
        with pytest.raises(DomainError):
            check_gradient_growth(heaviside, heaviside, 0.0)


class TestRauch:
    def test_sign_graph(self, sign_graph):
        report = check_rauch_condition(sign_graph)
        assert report.ok
        assert 0.0 < report.radius <= 0.02

    def test_shifted_heaviside_needs_radius(self):
        g = PiecewiseGraph.from_pieces([(-2.0, "-1"), (2.0, "-0.5")], "1")
        report = check_rauch_condition(g)
        assert report.ok
        assert 2.0 < report.radius <= 2.02

    def test_decreasing_graph_fails(self):
        report = check_rauch_condition(PiecewiseGraph.from_expression("-t"))
        assert not report.ok
        assert math.isinf(report.radius)
