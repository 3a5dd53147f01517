"""Unit tests for wentzell.graphlib.mollifier."""

from __future__ import annotations

import math

import numpy as np
import pytest

from wentzell.errors import DomainError
from wentzell.graphlib.graph import PiecewiseGraph
from wentzell.graphlib.mollifier import (
    MollifierKernel,
    bump_derivative,
    bump_profile,
    mollify,
    mollify_derivative,
    mollify_derivative_many,
    mollify_many,
)


class TestKernel:
    def test_bump_is_normalized(self, kernel):
        assert kernel.is_normalized()
        assert kernel.total_mass() == pytest.approx(1.0, abs=1e-12)

    def test_support(self, kernel):
        np.testing.assert_array_equal(kernel(np.array([-1.2, -1.0, 1.0, 3.0])), np.zeros(4))
        assert kernel(np.array([0.0]))[0] > 0

    def test_scaled_kernel(self, kernel):
        assert kernel.scaled(np.array([0.05]), 0.1)[0] == pytest.approx(kernel(np.array([0.5]))[0] / 0.1)

    def test_profile_derivative_matches_difference_quotient(self):
        x = np.array([-0.7, -0.2, 0.3, 0.8])
        h = 1e-6
        quotient = (bump_profile(x + h) - bump_profile(x - h)) / (2 * h)
        np.testing.assert_allclose(bump_derivative(x), quotient, rtol=1e-6, atol=1e-10)

    def test_negative_profile_rejected(self):
        with pytest.raises(DomainError, match="negative"):
            MollifierKernel.from_profile(lambda x: -bump_profile(x), bump_derivative, name="neg")

    def test_wide_support_rejected(self):
        def wide(x: np.ndarray) -> np.ndarray:
            return np.exp(-np.asarray(x, dtype=float) ** 2)

        with pytest.raises(DomainError, match="not supported"):
            MollifierKernel.from_profile(wide, wide, name="gauss")


class TestMollify:
    def test_heaviside_midpoint(self, heaviside, kernel):
        assert mollify(heaviside, kernel, 0.1, 0.0) == pytest.approx(0.5, abs=1e-8)

    def test_constant_away_from_jump(self, heaviside, kernel):
        values = mollify_many(heaviside, kernel, 0.1, np.array([-0.5, -0.1, 0.1, 0.5]))
        np.testing.assert_allclose(values, [0.0, 0.0, 1.0, 1.0], atol=1e-12)

    def test_reproduces_affine_graphs(self, kernel):
        g = PiecewiseGraph.from_expression("2*t - 1")
        xi = np.array([-1.0, 0.0, 0.3])
        np.testing.assert_allclose(mollify_many(g, kernel, 0.25, xi), 2 * xi - 1, atol=1e-10)

    def test_values_within_envelope_range(self, sign_graph, kernel):
        xi = np.linspace(-0.2, 0.2, 41)
        values = mollify_many(sign_graph, kernel, 0.1, xi)
        assert np.all(values >= -1.0 - 1e-12)
        assert np.all(values <= 1.0 + 1e-12)
        assert np.all(np.diff(values) >= -1e-12)

    def test_converges_pointwise_off_breakpoints(self, sign_graph, kernel):
        for eps in (0.1, 0.01, 0.001):
            assert mollify(sign_graph, kernel, eps, 0.3) == pytest.approx(1.0, abs=1e-12)

    def test_shape_preserved(self, heaviside, kernel):
        values = mollify_many(heaviside, kernel, 0.1, np.zeros((2, 3)))
        assert values.shape == (2, 3)

    def test_nonpositive_eps_rejected(self, heaviside, kernel):
        with pytest.raises(DomainError, match="positive"):
            mollify(heaviside, kernel, 0.0, 0.0)


class TestMollifyDerivative:
    def test_affine_slope(self, kernel):
        g = PiecewiseGraph.from_expression("3*t")
        np.testing.assert_allclose(
            mollify_derivative_many(g, kernel, 0.1, np.array([-0.4, 0.0, 0.7])), 3.0, rtol=1e-7
        )

    def test_heaviside_gives_scaled_kernel(self, heaviside, kernel):
        eps = 0.1
        expected = kernel(np.array([0.0]))[0] / eps
        assert mollify_derivative(heaviside, kernel, eps, 0.0) == pytest.approx(expected, rel=1e-8)

    def test_matches_difference_quotient(self, kernel):
        g = PiecewiseGraph.from_expression("tanh(t)")
        eps, xi, h = 0.2, 0.35, 1e-5
        quotient = (mollify(g, kernel, eps, xi + h) - mollify(g, kernel, eps, xi - h)) / (2 * h)
        assert mollify_derivative(g, kernel, eps, xi) == pytest.approx(quotient, rel=1e-6)

    def test_flat_away_from_jump(self, heaviside, kernel):
        assert mollify_derivative(heaviside, kernel, 0.1, 0.5) == pytest.approx(0.0, abs=1e-10)
        assert math.isfinite(mollify_derivative(heaviside, kernel, 0.1, 0.1))
