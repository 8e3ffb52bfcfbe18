"""Kernel functions over sparse vectors."""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from budgetsvm.models.dataset import SparseDataset, stack_vectors
from budgetsvm.models.sparse import SparseVector, sparse_dot, squared_distance


class KernelKind(Enum):
    """Supported kernel families."""

    GAUSSIAN = "gaussian"
    LINEAR = "linear"

    @classmethod
    def from_name(cls, name: str) -> "KernelKind":
        """Look up a kernel kind by (case-insensitive) name."""
        try:
            return cls(name.lower())
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ValueError(f"Unknown kernel '{name}' (expected one of: {choices})")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its bandwidth.

    ``gamma`` is only read for the Gaussian kernel
    k(a, b) = exp(-gamma * ||a - b||^2).
    """

    kind: KernelKind = KernelKind.GAUSSIAN
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if self.kind is KernelKind.GAUSSIAN and not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @classmethod
    def gaussian(cls, gamma: float) -> "KernelSpec":
        return cls(KernelKind.GAUSSIAN, gamma)

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls(KernelKind.LINEAR, 1.0)

    @property
    def unit_diagonal(self) -> bool:
        """True when k(x, x) = 1 for every x."""
        return self.kind is KernelKind.GAUSSIAN

    def describe(self) -> str:
        """Short header form, e.g. ``kernel=gaussian gamma=0.5``."""
        if self.kind is KernelKind.GAUSSIAN:
            return f"kernel=gaussian gamma={self.gamma!r}"
        return "kernel=linear"


def kernel_eval(spec: KernelSpec, a: SparseVector, b: SparseVector) -> float:
    """Evaluate k(a, b)."""
    if spec.kind is KernelKind.GAUSSIAN:
        return math.exp(-spec.gamma * squared_distance(a, b))
    return sparse_dot(a, b)


def kernel_row(spec: KernelSpec, x: SparseVector, points) -> np.ndarray:
    """Evaluate k(x, p) for every point, matching ``kernel_eval`` exactly."""
    return np.fromiter(
        (kernel_eval(spec, x, p) for p in points), dtype=np.float64, count=len(points)
    )


def diagonal(spec: KernelSpec, x: SparseVector) -> float:
    """k(x, x); 1 for the Gaussian kernel, ||x||^2 for the linear one."""
    value = kernel_eval(spec, x, x)
    if spec.unit_diagonal:
        assert value == 1.0, "Gaussian kernel diagonal must be 1"
    return value


def gram_matrix(spec: KernelSpec, rows_a, rows_b) -> np.ndarray:
    """Dense kernel matrix between two lists of sparse vectors.

    Vectorized through CSR products; agrees with ``kernel_eval`` up to
    rounding, not bit for bit.
    """
    rows_a, rows_b = list(rows_a), list(rows_b)
    if not rows_a or not rows_b:
        return np.zeros((len(rows_a), len(rows_b)))
    d = max(v.dimension for v in rows_a + rows_b)
    mat_a = stack_vectors(rows_a, d)
    mat_b = stack_vectors(rows_b, d)
    inner = (mat_a @ mat_b.T).toarray()
    if spec.kind is KernelKind.LINEAR:
        return inner
    norms_a = np.array([v.norm_sq for v in rows_a])
    norms_b = np.array([v.norm_sq for v in rows_b])
    dist = norms_a[:, None] + norms_b[None, :] - 2.0 * inner
    np.maximum(dist, 0.0, out=dist)
    return np.exp(-spec.gamma * dist)


def q_matrix(ds: SparseDataset, spec: KernelSpec) -> np.ndarray:
    """Q with Q_ij = y_i y_j k(x_i, x_j), exactly symmetric."""
    gram = gram_matrix(spec, ds.examples, ds.examples)
    gram = 0.5 * (gram + gram.T)
    if spec.unit_diagonal:
        np.fill_diagonal(gram, 1.0)
    return ds.labels[:, None] * gram * ds.labels[None, :]
