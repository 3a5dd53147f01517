"""Unit tests for wentzell.verify.inclusion."""

from __future__ import annotations

import numpy as np
import pytest

from wentzell.graphlib.graph import PiecewiseGraph
from wentzell.models import Trajectory
from wentzell.solver.runner import solve
from wentzell.verify.inclusion import default_tolerance, inclusion_check

ZERO = PiecewiseGraph.from_expression("0")


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _make_trajectory(states: list[list[float]], xi_gamma: list[list[float]]) -> Trajectory:
    """Three vertices on (0, 1), boundary vertices 0 and 2, zero interior reaction."""
    S = np.array(states, dtype=float)
    rows = len(S)
    return Trajectory(
        times=np.linspace(0.0, 0.1 * (rows - 1), rows),
        states=S,
        reaction_omega=np.zeros_like(S),
        reaction_gamma=np.array(xi_gamma, dtype=float),
        loads=np.zeros_like(S),
        boundary_vertices=np.array([0, 2]),
        newton_iterations=np.zeros(rows, dtype=int),
        newton_residuals=np.zeros(rows),
        eps=0.1,
        mesh_size=0.5,
    )


def _make_one_bad_node() -> Trajectory:
    # vertex 2 sits at u = 0.5 where the Heaviside envelope is {1}, but carries 0.3
    return _make_trajectory([[0.0, 0.0, 0.0], [0.05, 0.5, 0.5]], [[0.5, 0.5], [0.7, 0.3]])


# ---------------------------------------------------------------------------
# Tolerance
# ---------------------------------------------------------------------------


class TestDefaultTolerance:
    def test_formula(self):
        tol = default_tolerance(0.1, np.array([0.0, 1.0]), np.array([2.0, 0.0]))
        np.testing.assert_allclose(tol, [0.2 + 1e-8, 1.0 + 1e-8])

    def test_factor(self):
        assert default_tolerance(0.1, np.array([1.0]), np.array([0.0]), factor=1.0)[0] == pytest.approx(0.1)


# ---------------------------------------------------------------------------
# inclusion_check
# ---------------------------------------------------------------------------


class TestInclusionCheck:
    def test_all_inside(self, heaviside):
        traj = _make_trajectory([[0.0, 0.0, 0.0], [0.05, 0.5, -0.5]], [[0.5, 0.5], [0.7, 0.0]])
        report = inclusion_check(traj, ZERO, heaviside, 0.1)
        assert report.fraction_inside == 1.0
        assert report.worst_distance == 0.0
        assert report.n_checked == 10

    def test_worst_location(self, heaviside):
        report = inclusion_check(_make_one_bad_node(), ZERO, heaviside, 0.1)
        assert report.fraction_inside == pytest.approx(0.9)
        assert report.worst_distance == pytest.approx(0.7)
        assert report.worst_step == 1
        assert report.worst_node == 2

    def test_pointwise_figures(self, heaviside):
        report = inclusion_check(_make_one_bad_node(), ZERO, heaviside, 0.1)
        # vertex 0 at u = 0.05 lies inside the window envelope [0, 1] but 0.3 from {1}
        assert report.pointwise_worst == pytest.approx(0.7)
        assert report.pointwise_fraction == pytest.approx(0.9)

    def test_widen(self, heaviside):
        report = inclusion_check(_make_one_bad_node(), ZERO, heaviside, 0.1, widen=1.0)
        assert report.fraction_inside == 1.0
        assert report.worst_distance == 0.0

    def test_custom_tolerance(self, heaviside):
        report = inclusion_check(
            _make_one_bad_node(), ZERO, heaviside, 0.1, lambda eps, jump, lip: np.full_like(jump, 1.0)
        )
        assert report.fraction_inside == 1.0
        assert report.worst_distance == pytest.approx(0.7)

    def test_mollified_reactions_lie_in_window_envelope(self, make_config, heaviside):
        config = make_config(gamma2=heaviside, u0="-0.05 + 0.1*x", T=0.3)
        traj, _ = solve(config)
        report = inclusion_check(traj, config.gamma1, config.gamma2, config.eps)
        assert report.fraction_inside == 1.0
        assert report.worst_distance <= 1e-10
