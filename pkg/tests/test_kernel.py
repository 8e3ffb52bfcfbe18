"""Tests for kernel evaluation."""

import math

import numpy as np
import pytest

from budgetsvm.models import (
    KernelKind,
    KernelSpec,
    SparseDataset,
    SparseVector,
    gram_matrix,
    kernel_eval,
    kernel_row,
    q_matrix,
)


def random_points(seed, count, d=5):
    rng = np.random.default_rng(seed)
    return [SparseVector.from_dense(rng.standard_normal(d) * (rng.random(d) < 0.7)) for _ in range(count)]


class TestKernelSpec:
    """Tests for KernelSpec."""

    def test_from_name(self):
        """Test case-insensitive kernel lookup."""
        assert KernelKind.from_name("Gaussian") is KernelKind.GAUSSIAN
        assert KernelKind.from_name("linear") is KernelKind.LINEAR

    def test_unknown_kernel(self):
        """Test that an unknown kernel name raises ValueError."""
        with pytest.raises(ValueError) as exc_info:
            KernelKind.from_name("poly")
        assert "poly" in str(exc_info.value)

    def test_gamma_must_be_positive(self):
        """Test that a Gaussian kernel needs gamma > 0."""
        with pytest.raises(ValueError):
            KernelSpec.gaussian(0.0)

    def test_describe(self):
        """Test the header form."""
        assert KernelSpec.gaussian(0.5).describe() == "kernel=gaussian gamma=0.5"
        assert KernelSpec.linear().describe() == "kernel=linear"


class TestKernelEval:
    """Tests for kernel_eval and kernel_row."""

    def test_gaussian_matches_dense(self):
        """Test the Gaussian kernel against a dense computation."""
        spec = KernelSpec.gaussian(0.3)
        a, b = random_points(0, 2)
        dense = math.exp(-0.3 * float(np.sum((a.to_dense(5) - b.to_dense(5)) ** 2)))
        assert kernel_eval(spec, a, b) == pytest.approx(dense, rel=1e-10)

    def test_gaussian_diagonal_is_one(self):
        """Test k(x, x) = 1 exactly."""
        spec = KernelSpec.gaussian(2.0)
        for x in random_points(1, 10):
            assert kernel_eval(spec, x, x) == 1.0

    def test_linear(self):
        """Test the linear kernel is the inner product."""
        a = SparseVector.from_pairs([(0, 1.0), (1, 2.0)])
        b = SparseVector.from_pairs([(1, 3.0), (2, 4.0)])
        assert kernel_eval(KernelSpec.linear(), a, b) == 6.0

    def test_symmetry(self):
        """Test k(a, b) == k(b, a)."""
        spec = KernelSpec.gaussian(1.0)
        a, b = random_points(2, 2)
        assert kernel_eval(spec, a, b) == kernel_eval(spec, b, a)

    def test_kernel_row_matches_scalar(self):
        """Test that kernel_row equals repeated kernel_eval bit for bit."""
        spec = KernelSpec.gaussian(0.7)
        points = random_points(3, 12)
        row = kernel_row(spec, points[0], points)
        assert row.tolist() == [kernel_eval(spec, points[0], p) for p in points]


class TestGramMatrix:
    """Tests for gram_matrix and q_matrix."""

    def test_gram_matches_scalar(self):
        """Test the vectorized Gram matrix against scalar evaluation."""
        spec = KernelSpec.gaussian(0.4)
        rows_a, rows_b = random_points(4, 6), random_points(5, 9)
        gram = gram_matrix(spec, rows_a, rows_b)
        assert gram.shape == (6, 9)
        for i, a in enumerate(rows_a):
            for j, b in enumerate(rows_b):
                assert gram[i, j] == pytest.approx(kernel_eval(spec, a, b), rel=1e-10, abs=1e-14)

    def test_gram_linear(self):
        """Test the linear Gram matrix."""
        rows = random_points(6, 4)
        gram = gram_matrix(KernelSpec.linear(), rows, rows)
        dense = np.array([r.to_dense(5) for r in rows])
        np.testing.assert_allclose(gram, dense @ dense.T, atol=1e-12)

    def test_gram_empty(self):
        """Test empty inputs give an empty matrix."""
        assert gram_matrix(KernelSpec.gaussian(1.0), [], random_points(7, 3)).shape == (0, 3)

    def test_q_matrix(self):
        """Test Q_ij = y_i y_j k(x_i, x_j), symmetric with unit diagonal."""
        spec = KernelSpec.gaussian(0.5)
        points = random_points(8, 5)
        labels = np.array([1.0, -1.0, 1.0, 1.0, -1.0])
        ds = SparseDataset.from_vectors(points, labels)
        q = q_matrix(ds, spec)
        np.testing.assert_array_equal(q, q.T)
        np.testing.assert_array_equal(np.diag(q), np.ones(5))
        assert q[0, 1] == pytest.approx(-kernel_eval(spec, points[0], points[1]), rel=1e-10)
