"""Labeled sparse dataset."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from budgetsvm.models.sparse import SparseVector


@dataclass(frozen=True)
class SparseDataset:
    """Training or test examples with labels in {-1, +1}.

    Immutable after construction; ``d`` is the largest 1-based feature index
    seen (equivalently the dense width needed for the examples).
    """

    examples: tuple[SparseVector, ...]
    labels: np.ndarray
    d: int

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels, dtype=np.float64)
        if len(self.examples) == 0:
            raise ValueError("dataset must contain at least one example")
        if len(self.examples) != labels.size:
            raise ValueError(
                f"{len(self.examples)} examples but {labels.size} labels"
            )
        if not np.all((labels == 1.0) | (labels == -1.0)):
            raise ValueError("labels must be exactly -1 or +1")
        labels.setflags(write=False)
        object.__setattr__(self, "examples", tuple(self.examples))
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_vectors(cls, examples, labels) -> "SparseDataset":
        """Build a dataset, deriving ``d`` from the examples."""
        examples = tuple(examples)
        d = max((x.dimension for x in examples), default=0)
        return cls(examples, np.asarray(labels, dtype=np.float64), d)

    @property
    def n(self) -> int:
        """Number of examples."""
        return len(self.examples)

    @property
    def positive_fraction(self) -> float:
        """Fraction of +1 labels."""
        return float(np.mean(self.labels > 0))

    @cached_property
    def norms_sq(self) -> np.ndarray:
        """Squared norms of all examples."""
        return np.array([x.norm_sq for x in self.examples])

    def to_csr(self, d: int | None = None) -> sp.csr_matrix:
        """Stack the examples into a CSR matrix with ``d`` columns."""
        return stack_vectors(self.examples, self.d if d is None else d)

    def subset(self, rows) -> "SparseDataset":
        """Dataset restricted to the given row indices (order kept)."""
        rows = list(rows)
        return SparseDataset(
            tuple(self.examples[r] for r in rows), self.labels[rows], self.d
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseDataset):
            return NotImplemented
        return (
            self.d == other.d
            and np.array_equal(self.labels, other.labels)
            and self.examples == other.examples
        )


def stack_vectors(vectors, d: int) -> sp.csr_matrix:
    """Stack sparse vectors into a CSR matrix of width ``d``."""
    vectors = list(vectors)
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    if vectors:
        indptr[1:] = np.cumsum([v.nnz for v in vectors])
        indices = np.concatenate([v.indices for v in vectors])
        data = np.concatenate([v.values for v in vectors])
    else:
        indices = np.empty(0, dtype=np.int64)
        data = np.empty(0)
    width = max([d] + [v.dimension for v in vectors])
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), width))
