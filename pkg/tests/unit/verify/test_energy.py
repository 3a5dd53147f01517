"""Unit tests for wentzell.verify.energy and the ledger constants."""

from __future__ import annotations

import math
from dataclasses import replace

import pytest

from wentzell.fem.assembly import BoundaryCoefficient
from wentzell.fem.mesh import IntervalSpec, PolygonSpec
from wentzell.graphlib.graph import PiecewiseGraph
from wentzell.models import EnergyLedger, GrowthParams, Trajectory
from wentzell.solver.manufactured import manufactured_sources
from wentzell.solver.problem import SourceTerm, build_solve_config
from wentzell.solver.runner import solve
from wentzell.verify.energy import apriori_bound, energy_check, reaction_growth_check

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _make_run(load_problem, stem: str) -> tuple[Trajectory, EnergyLedger]:
    return solve(build_solve_config(load_problem(stem)))

# ---------------------------------------------------------------------------
# energy_check
# ---------------------------------------------------------------------------

class TestEnergyCheck:
    def test_zero_problem_passes(self, load_problem):
        traj, ledger = _make_run(load_problem, "zero_1d")
        report = energy_check(traj, ledger)
        assert report.ok
        assert report.worst_violation <= 0.0
        assert len(report.step_pass) == traj.n_steps
        assert report.bound is None

    @pytest.mark.parametrize("stem", ["smooth_1d", "heaviside_1d", "case4_1d"])
    def test_shipped_problems_pass(self, load_problem, stem):
        traj, ledger = _make_run(load_problem, stem)
        report = energy_check(traj, ledger)
        assert report.ok
        assert all(report.step_pass)
        assert report.coercivity_ok
        assert report.integrated_ok

    def test_overstated_coercivity_fails(self, make_config):
        traj, ledger = solve(make_config(u0="1 + x", T=0.3))
        # with a = 1 the quotient <(K+R)U, U> / |U|_V^2 stays below one
        report = energy_check(traj, ledger.with_coercivity(1.0))
        assert not report.ok
        assert not report.coercivity_ok
        assert report.worst_coercivity_gap > 0

    def test_inflated_state_breaks_step(self, make_config):
        traj, ledger = solve(make_config(u0="cos(pi*x)", T=0.3))
        h = ledger.h_norm_sq.copy()
        h[-1] = 10.0 * h[0] + 1.0
        report = energy_check(traj, replace(ledger, h_norm_sq=h))
        assert not report.ok
        assert not report.step_pass[-1]
        assert report.worst_violation > 0
        assert report.worst_step == traj.n_steps

    def test_growth_adds_bound_and_reaction_report(self, load_problem):
        traj, ledger = _make_run(load_problem, "heaviside_1d")
        report = energy_check(traj, ledger)
        assert report.bound is not None
        assert report.bound.ok
        assert report.reaction_growth is not None
        assert report.reaction_growth.ok

# ---------------------------------------------------------------------------
# Dimension x graph x forcing matrix
# ---------------------------------------------------------------------------

_DOMAINS = {
    "1d": (IntervalSpec(0.0, 1.0, 4), 1, "cos(pi*x)"),
    "2d": (PolygonSpec(((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)), 0.5), 2, "cos(pi*x)*cos(pi*y)"),
}

_GRAPHS = {
    "smooth": lambda: PiecewiseGraph.from_expression("tanh(t)"),
    "heaviside": lambda: PiecewiseGraph.from_pieces([(0.0, "0")], "1"),
    "sign": lambda: PiecewiseGraph.from_expression("sign(t)"),
}


def _matrix_config(make_config, dim: str, graph: str, forcing: str):
    domain, n_dim, profile = _DOMAINS[dim]
    g = _GRAPHS[graph]()
    a_field = BoundaryCoefficient.parse("1", 1.0)
    overrides = {"domain": domain, "gamma1": g, "gamma2": g, "a_field": a_field, "u0": f"0.5*{profile}"}
    if forcing == "manufactured":
        exact = SourceTerm.parse(f"0.5*exp(-t)*{profile}")
        # nonsmooth graphs get the sources of the reaction-free problem
        source_graph = g if g.is_smooth else PiecewiseGraph.from_expression("0")
        f1, f2 = manufactured_sources(exact.expr, source_graph, source_graph, a_field, n_dim)
        overrides.update(f1=f1, f2=f2)
    return make_config(**overrides)


class TestEnergyMatrix:
    @pytest.mark.parametrize("forcing", ["zero", "manufactured"])
    @pytest.mark.parametrize("graph", ["smooth", "heaviside", "sign"])
    @pytest.mark.parametrize("dim", ["1d", "2d"])
    def test_inequalities_hold(self, make_config, dim, graph, forcing):
        traj, ledger = solve(_matrix_config(make_config, dim, graph, forcing))
        report = energy_check(traj, ledger)
        assert report.ok, (dim, graph, forcing, report.worst_violation)
        assert all(report.step_pass)
        assert report.coercivity_ok
        assert report.integrated_ok

    @pytest.mark.parametrize("dim", ["1d", "2d"])
    def test_corrupted_coercivity_is_caught(self, make_config, dim):
        traj, ledger = solve(_matrix_config(make_config, dim, "heaviside", "zero"))
        report = energy_check(traj, ledger.with_coercivity(10.0 * ledger.coercivity))
        assert not report.ok
        assert not report.coercivity_ok


# ---------------------------------------------------------------------------
# Ledger constants
# ---------------------------------------------------------------------------

class TestLedgerConstants:
    def test_sublinear_constants(self, load_problem):
        _, ledger = _make_run(load_problem, "heaviside_1d")
        # c = 1, theta = 0: widened factor 2, |omega| = 1, |gamma| = 2, T = 0.5
        consts = ledger.constants()
        assert consts.a1 == pytest.approx(2.0)
        assert consts.a1p == pytest.approx(2.0)
        assert consts.a2 == pytest.approx(2.0 * math.sqrt(2.0))
        assert consts.a2p == pytest.approx(2.0 * math.sqrt(2.0))

    def test_linear_constants(self, load_problem):
        _, ledger = _make_run(load_problem, "case4_1d")
        consts = ledger.constants(t=1.0)
        widened = 0.1 * (1.0 + 0.1)
        assert consts.a2 == pytest.approx(widened * 2.0)
        assert consts.a2p == pytest.approx(widened * math.sqrt(2.0))

    def test_missing_growth_gives_nan(self, load_problem):
        _, ledger = _make_run(load_problem, "zero_1d")
        assert math.isnan(ledger.constants().a1)

# ---------------------------------------------------------------------------
# A priori bound and reaction growth
# ---------------------------------------------------------------------------

class TestAprioriBound:
    def test_zero_budget_root(self, load_problem):
        _, ledger = _make_run(load_problem, "zero_1d")
        growth = GrowthParams(1.0, 0.0)
        bound = apriori_bound(replace(ledger, growth1=growth, growth2=growth))
        assert 0.0 < bound.x_star < math.inf
        assert bound.observed_x == 0.0
        assert bound.ok

    def test_root_solves_balance(self, load_problem):
        _, ledger = _make_run(load_problem, "heaviside_1d")
        bound = apriori_bound(ledger)
        assert bound.observed_x <= bound.x_star
        assert bound.observed_max_state_sq <= bound.state_bound_sq

    def test_large_linear_constants_have_no_root(self, load_problem):
        _, ledger = _make_run(load_problem, "case4_1d")
        big = GrowthParams(5.0, 1.0)
        bound = apriori_bound(replace(ledger, growth1=big, growth2=big))
        assert math.isinf(bound.x_star)
        assert math.isinf(bound.state_bound_sq)
        assert bound.ok

    def test_nearly_linear_growth_does_not_overflow(self, load_problem):
        _, ledger = _make_run(load_problem, "case4_1d")
        steep = GrowthParams(0.3, 0.99)
        bound = apriori_bound(replace(ledger, growth1=steep, growth2=steep))
        assert bound.x_star > 0.0
        assert bound.ok

    def test_failed_smallness_is_a_finding(self, load_problem):
        traj, ledger = _make_run(load_problem, "case4_1d")
        big = GrowthParams(5.0, 1.0)
        report = energy_check(traj, replace(ledger, growth1=big, growth2=big))
        assert math.isinf(report.bound.x_star)
        assert report.integrated_ok

    def test_none_without_growth(self, load_problem):
        _, ledger = _make_run(load_problem, "zero_1d")
        assert apriori_bound(ledger) is None
        assert reaction_growth_check(ledger) is None

class TestReactionGrowth:
    def test_inflated_reactions_fail(self, load_problem):
        _, ledger = _make_run(load_problem, "heaviside_1d")
        inflated = replace(ledger, xi_gamma_norm_sq=1e6 * (ledger.xi_gamma_norm_sq + 1.0))
        report = reaction_growth_check(inflated)
        assert not report.ok
        assert report.gamma_norm > report.gamma_bound

    def test_norms_reported(self, load_problem):
        _, ledger = _make_run(load_problem, "heaviside_1d")
        report = reaction_growth_check(ledger)
        assert report.ok
        assert report.omega_norm == pytest.approx(0.0, abs=1e-12)
        assert 0.0 <= report.gamma_norm <= report.gamma_bound
