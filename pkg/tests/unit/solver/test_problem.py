"""Unit tests for wentzell.solver.problem."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from wentzell.config import ProblemConfig
from wentzell.errors import DomainError
from wentzell.fem.mesh import IntervalSpec, PolygonSpec
from wentzell.models import EpsSchedule
from wentzell.solver.problem import SourceTerm, build_solve_config, domain_spec, growth_params

CONFIG_DIR = Path(__file__).resolve().parents[3] / "config"


# ---------------------------------------------------------------------------
# SourceTerm
# ---------------------------------------------------------------------------


class TestSourceTerm:
    def test_space_time_evaluation(self):
        f = SourceTerm.parse("t + x*y")
        np.testing.assert_allclose(f(2.0, np.array([[1.0, 3.0], [0.5, 0.5]])), [5.0, 2.25])

    def test_one_dimensional_points_see_zero_y(self):
        f = SourceTerm.parse("x + y")
        np.testing.assert_allclose(f(0.0, np.array([[0.25], [0.75]])), [0.25, 0.75])

    def test_normals(self):
        f = SourceTerm.parse("nx - ny")
        points = np.zeros((2, 2))
        normals = np.array([[1.0, 0.0], [0.0, 1.0]])
        np.testing.assert_allclose(f(0.0, points, normals), [1.0, -1.0])
        np.testing.assert_allclose(f(0.0, points), [0.0, 0.0])

    def test_is_zero(self):
        assert SourceTerm.parse("0").is_zero
        assert SourceTerm.parse(0).is_zero
        assert not SourceTerm.parse("x").is_zero


# ---------------------------------------------------------------------------
# SolveConfig
# ---------------------------------------------------------------------------


class TestSolveConfig:
    @pytest.mark.parametrize("T, dt, steps", [(1.0, 0.3, 4), (1.0, 0.25, 4), (0.2, 0.1, 2), (0.05, 0.1, 1)])
    def test_uniform_grid(self, make_config, T, dt, steps):
        config = make_config(T=T, dt=dt)
        assert config.n_steps == steps
        assert config.step_size == pytest.approx(T / steps)

    @pytest.mark.parametrize("field, value", [("dt", 0.0), ("T", -1.0), ("eps", 0.0), ("newton_tol", float("nan"))])
    def test_nonpositive_parameters_rejected(self, make_config, field, value):
        with pytest.raises(DomainError, match=field):
            make_config(**{field: value})

    def test_unknown_projection_rejected(self, make_config):
        with pytest.raises(DomainError, match="projection"):
            make_config(initial_projection="spline")

    def test_newton_iterations_rejected(self, make_config):
        with pytest.raises(DomainError, match="newton_max_iter"):
            make_config(newton_max_iter=0)

    def test_assemble_builds_level(self, make_config):
        ops = make_config(mesh_level=1).assemble()
        assert ops.size == 5
        assert ops.coercivity is not None


# ---------------------------------------------------------------------------
# From ProblemConfig
# ---------------------------------------------------------------------------


class TestBuildSolveConfig:
    def test_defaults(self):
        config = build_solve_config(ProblemConfig.load(config_dir=CONFIG_DIR))
        assert config.domain == IntervalSpec(0.0, 1.0, 4)
        assert config.n_steps == 20
        assert config.eps == pytest.approx(0.1)
        assert config.growth1 is None
        assert config.exact is None

    def test_level_scaling(self, load_problem):
        config = build_solve_config(load_problem("smooth_1d"), level=2)
        assert config.mesh_level == 2
        assert config.dt == pytest.approx(0.0125)
        assert config.eps == pytest.approx(0.025)
        assert config.schedule is EpsSchedule.GEOMETRIC

    def test_constant_schedule_keeps_eps(self, write_problem):
        path = write_problem({"name": "flat", "regularization": {"eps": 0.2, "schedule": "constant"}})
        config = build_solve_config(ProblemConfig.load(path, config_dir=CONFIG_DIR), level=3)
        assert config.eps == pytest.approx(0.2)
        assert config.dt == pytest.approx(0.05 / 8)

    def test_manufactured_initial_datum(self, load_problem):
        config = build_solve_config(load_problem("smooth_1d"))
        np.testing.assert_allclose(config.u0(0.0, np.array([[0.0], [1.0]])), [1.0, -1.0], atol=1e-14)
        assert config.exact is not None
        assert not config.f1.is_zero

    def test_polygon_domain(self, load_problem):
        problem = load_problem("sign_2d")
        spec = domain_spec(problem)
        assert isinstance(spec, PolygonSpec)
        assert spec.h == 0.5
        assert len(spec.vertices) == 4

    def test_growth_params(self, load_problem):
        g1, g2 = growth_params(load_problem("heaviside_1d"))
        assert (g1.c, g1.theta, g1.d) == (1.0, 0.0, None)
        assert g2.d == 0.0

    def test_negative_level_rejected(self, load_problem):
        with pytest.raises(DomainError):
            build_solve_config(load_problem("zero_1d"), level=-1)
