"""Synthetic two-blob datasets for desk-scale experiments."""

import logging

import numpy as np

from budgetsvm.models import SparseDataset, SparseVector
from budgetsvm.utils.rng import DATA_STREAM, stream

logger = logging.getLogger(__name__)


def two_blobs(n: int, d: int, seed: int) -> SparseDataset:
    """Draw ``n`` points from two unit-covariance Gaussians.

    Labels are drawn uniformly from {-1, +1}; a point with label y is centred
    at y * 1 / sqrt(d).
    """
    if n < 1 or d < 1:
        raise ValueError(f"n and d must be positive, got n={n}, d={d}")
    rng = stream(seed, DATA_STREAM)
    labels = rng.choice(np.array([-1.0, 1.0]), size=n)
    centre = np.full(d, 1.0 / np.sqrt(d))
    features = labels[:, None] * centre[None, :] + rng.standard_normal((n, d))
    examples = [SparseVector.from_dense(row) for row in features]
    logger.debug(f"Generated {n} synthetic points in {d} dimensions")
    # Fixed width even if a trailing coordinate happens to be zero
    return SparseDataset(tuple(examples), labels, d)


def split(ds: SparseDataset, test_fraction: float, seed: int) -> tuple[SparseDataset, SparseDataset]:
    """Random train/test split."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = stream(seed, DATA_STREAM)
    order = rng.permutation(ds.n)
    cut = max(1, min(ds.n - 1, int(round(ds.n * test_fraction))))
    return ds.subset(sorted(order[cut:])), ds.subset(sorted(order[:cut]))
