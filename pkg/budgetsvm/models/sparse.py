"""Sparse feature vectors."""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class SparseVector:
    """Immutable sparse vector.

    ``indices`` are 0-based, strictly increasing feature positions and
    ``values`` the matching non-zero entries. The squared norm is computed
    once at construction since every Gaussian kernel evaluation needs it.
    """

    indices: np.ndarray
    values: np.ndarray
    norm_sq: float = field(init=False)

    def __post_init__(self) -> None:
        indices = np.ascontiguousarray(self.indices, dtype=np.int64)
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if indices.shape != values.shape or indices.ndim != 1:
            raise ValueError("indices and values must be 1-D arrays of equal length")
        if indices.size and (indices[0] < 0 or np.any(np.diff(indices) <= 0)):
            raise ValueError("indices must be non-negative and strictly increasing")
        if np.any(values == 0.0):
            raise ValueError("zero values must be omitted")
        indices.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "norm_sq", float(np.dot(values, values)))

    @classmethod
    def from_pairs(cls, pairs) -> "SparseVector":
        """Build from ``(index, value)`` pairs in any order.

        Zero values are dropped. Duplicate indices raise ``ValueError``.
        """
        pairs = sorted((int(i), float(v)) for i, v in pairs)
        for (a, _), (b, _) in zip(pairs, pairs[1:]):
            if a == b:
                raise ValueError(f"duplicate feature index {a}")
        kept = [(i, v) for i, v in pairs if v != 0.0]
        return cls(
            np.array([i for i, _ in kept], dtype=np.int64),
            np.array([v for _, v in kept], dtype=np.float64),
        )

    @classmethod
    def from_dense(cls, dense) -> "SparseVector":
        """Build from a dense array, omitting zeros."""
        dense = np.asarray(dense, dtype=np.float64)
        (nonzero,) = np.nonzero(dense)
        return cls(nonzero, dense[nonzero])

    @classmethod
    def empty(cls) -> "SparseVector":
        """The zero vector."""
        return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64))

    @property
    def nnz(self) -> int:
        """Number of stored entries."""
        return int(self.indices.size)

    @property
    def dimension(self) -> int:
        """Smallest dense length that holds this vector."""
        return int(self.indices[-1]) + 1 if self.indices.size else 0

    def to_dense(self, d: int | None = None) -> np.ndarray:
        """Expand to a dense array of length ``d``."""
        out = np.zeros(self.dimension if d is None else d)
        out[self.indices] = self.values
        return out

    def combine(self, other: "SparseVector", a: float, b: float) -> "SparseVector":
        """Return ``a * self + b * other`` with exact zeros removed."""
        union = np.union1d(self.indices, other.indices)
        values = np.zeros(union.size)
        values[np.searchsorted(union, self.indices)] += a * self.values
        values[np.searchsorted(union, other.indices)] += b * other.values
        keep = values != 0.0
        return SparseVector(union[keep], values[keep])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return np.array_equal(self.indices, other.indices) and np.array_equal(
            self.values, other.values
        )

    def __hash__(self) -> int:
        return hash((self.indices.tobytes(), self.values.tobytes()))

    def __repr__(self) -> str:
        body = " ".join(
            f"{i + 1}:{v!r}" for i, v in zip(self.indices.tolist(), self.values.tolist())
        )
        return f"SparseVector({body})"


def sparse_dot(a: SparseVector, b: SparseVector) -> float:
    """Inner product over shared indices.

    Both index arrays are sorted, so a merge by ``searchsorted`` over the
    shorter vector finds the shared positions.
    """
    if a.nnz == 0 or b.nnz == 0:
        return 0.0
    if a.nnz > b.nnz:
        a, b = b, a
    pos = np.searchsorted(b.indices, a.indices)
    pos[pos == b.nnz] = 0
    shared = b.indices[pos] == a.indices
    return float(np.dot(a.values[shared], b.values[pos[shared]]))


def squared_distance(a: SparseVector, b: SparseVector) -> float:
    """Squared Euclidean distance, clamped at zero against rounding."""
    if a is b or a == b:
        return 0.0
    dist = a.norm_sq + b.norm_sq - 2.0 * sparse_dot(a, b)
    return dist if dist > 0.0 else 0.0
