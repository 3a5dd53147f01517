"""Unit tests for wentzell.fem.coercivity."""

from __future__ import annotations

import numpy as np
import pytest
from scipy import linalg

from wentzell.errors import AssemblyError
from wentzell.fem.assembly import assemble
from wentzell.fem.coercivity import certify_coercivity, estimate_coercivity, estimate_lumped_embedding
from wentzell.fem.mesh import IntervalSpec, build_mesh


class TestEstimateCoercivity:
    def test_bounded_by_constant_quotient(self, ops_half):
        # U = 1 gives <(K+R)U, U> / <G U, U> = 2 / 3
        assert 0.0 < ops_half.coercivity <= 2.0 / 3.0 + 1e-12

    def test_matches_dense_generalized_eigenvalue(self, ops_1d):
        expected = linalg.eigh(ops_1d.operator.toarray(), ops_1d.gram.toarray(), eigvals_only=True)[0]
        assert estimate_coercivity(ops_1d) == pytest.approx(expected, rel=1e-12)

    def test_sparse_path_matches_dense(self, unit_a):
        ops = assemble(build_mesh(IntervalSpec(0.0, 1.0, 300)), unit_a, coercivity=False)
        assert ops.size > 200
        expected = linalg.eigh(ops.operator.toarray(), ops.gram.toarray(), eigvals_only=True)[0]
        assert estimate_coercivity(ops) == pytest.approx(expected, rel=1e-8)

    def test_square_positive(self, ops_square):
        assert 0.0 < ops_square.coercivity < 1.0


class TestCertify:
    def test_rayleigh_quotients_above_estimate(self, ops_1d):
        assert certify_coercivity(ops_1d, np.random.default_rng(0)) >= -1e-10

    def test_overestimate_detected(self, ops_1d):
        # (K + R) / G_V stays below one when a = 1
        inflated = ops_1d.with_coercivity(1.0)
        assert certify_coercivity(inflated, np.random.default_rng(0), samples=200) < 0

    def test_requires_estimate(self, half_mesh, unit_a):
        ops = assemble(half_mesh, unit_a, coercivity=False)
        with pytest.raises(AssemblyError):
            certify_coercivity(ops, np.random.default_rng(0))


class TestLumpedEmbedding:
    @pytest.mark.parametrize("fixture", ["ops_1d", "ops_square"])
    def test_inequality_holds(self, fixture, request):
        ops = request.getfixturevalue(fixture)
        k_omega, k_gamma = estimate_lumped_embedding(ops)
        assert k_omega > 0
        assert k_gamma > 0
        rng = np.random.default_rng(1)
        for _ in range(20):
            U = rng.standard_normal(ops.size)
            energy = U @ (ops.gram @ U)
            assert ops.lumped_omega @ U**2 <= k_omega**2 * energy * (1 + 1e-9)
            assert ops.lumped_gamma @ U**2 <= k_gamma**2 * energy * (1 + 1e-9)

    def test_embedding_at_least_constant_ratio(self, ops_half):
        # U = 1: sum L_omega = 1 against U^T G U = 3
        k_omega, k_gamma = estimate_lumped_embedding(ops_half)
        assert k_omega**2 >= 1.0 / 3.0 - 1e-12
        assert k_gamma**2 >= 2.0 / 3.0 - 1e-12
