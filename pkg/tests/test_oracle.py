"""Tests for the reference QP solver."""

import numpy as np
import pytest

from budgetsvm.analysis.oracle import dual_value, projected_residual, solve_dual_qp
from budgetsvm.config import Algorithm, TrainConfig
from budgetsvm.data.synth import two_blobs
from budgetsvm.models import KernelSpec, q_matrix
from budgetsvm.training import train


class TestSolveDualQP:
    """Tests for solve_dual_qp."""

    def test_identity(self):
        """Test Q = I has optimum alpha = min(1, C)."""
        solution = solve_dual_qp(np.eye(4), 0.5)
        np.testing.assert_allclose(solution.alpha, 0.5)
        assert solution.objective == pytest.approx(4 * (0.5 - 0.125))
        assert solution.converged

    def test_identity_unclipped(self):
        """Test the interior optimum alpha = 1 for large C."""
        solution = solve_dual_qp(np.eye(3), 10.0)
        np.testing.assert_allclose(solution.alpha, 1.0, atol=1e-10)

    def test_stationarity(self):
        """Test the projected gradient residual is below tolerance."""
        ds = two_blobs(20, 10, seed=1)
        Q = q_matrix(ds, KernelSpec.gaussian(1.0))
        solution = solve_dual_qp(Q, 2.0)
        assert solution.converged
        assert projected_residual(Q, solution.alpha, 2.0) <= 1e-10
        assert np.all(solution.alpha >= 0.0) and np.all(solution.alpha <= 2.0)

    def test_optimum_beats_random_points(self):
        """Test no random feasible point has a higher objective."""
        ds = two_blobs(15, 10, seed=2)
        Q = q_matrix(ds, KernelSpec.gaussian(0.5))
        solution = solve_dual_qp(Q, 1.0)
        rng = np.random.default_rng(0)
        for _ in range(200):
            assert dual_value(Q, rng.uniform(0.0, 1.0, size=15)) <= solution.objective + 1e-12

    def test_iteration_cap(self, caplog):
        """Test a capped run reports non-convergence."""
        ds = two_blobs(20, 10, seed=1)
        Q = q_matrix(ds, KernelSpec.gaussian(1.0))
        solution = solve_dual_qp(Q, 5.0, max_iter=1)
        assert not solution.converged
        assert solution.iterations == 1
        assert "QP oracle stopped" in caplog.text


class TestScaReachesOracle:
    """Exact SCA against the oracle on a tiny instance."""

    def test_sca_converges_to_oracle(self):
        """Test SCA with an inactive budget reaches the QP optimum."""
        ds = two_blobs(20, 10, seed=3)
        spec = KernelSpec.gaussian(0.5)
        oracle = solve_dual_qp(q_matrix(ds, spec), 1.0)
        config = TrainConfig(algo=Algorithm.BSCA, C=1.0, kernel=spec, budget=20, epochs=200, log_every=200)
        result = train(config, ds, ds)
        assert result.records[-1].dual_obj == pytest.approx(oracle.objective, abs=1e-6)
