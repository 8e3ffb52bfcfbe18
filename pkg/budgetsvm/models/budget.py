"""Budgeted kernel expansion and dual coefficient state."""

import logging
from dataclasses import dataclass, field

import numpy as np

from budgetsvm.models.kernel import KernelSpec, gram_matrix, kernel_row
from budgetsvm.models.sparse import SparseVector

logger = logging.getLogger(__name__)

# Entries whose effective coefficient is smaller than this are dropped
COEFFICIENT_FLOOR = 1e-12

# The global scale is folded into the betas once it falls below this
SCALE_FLOOR = 1e-6


@dataclass
class ModelEntry:
    """One basis function beta * phi(point).

    A pristine entry holds an unmodified copy of a training point; merged and
    loaded entries are not pristine and never absorb later updates.
    """

    beta: float
    point: SparseVector
    pristine: bool = True


class BudgetModel:
    """Kernel expansion w = scale * sum_j beta_j phi(x_j) with at most B terms.

    ``capacity`` is the budget B; None means unbounded (the exact solvers).
    Between maintenance events the model holds at most B entries; right after
    an insertion it may briefly hold B + 1.
    """

    def __init__(self, spec: KernelSpec, capacity: int | None = None):
        if capacity is not None and capacity < 1:
            raise ValueError(f"Budget must be positive, got {capacity}")
        self.spec = spec
        self.capacity = capacity
        self.scale = 1.0
        self.entries: list[ModelEntry] = []
        self._pristine: dict[SparseVector, ModelEntry] = {}

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def over_budget(self) -> bool:
        """True when the model must be reduced by budget maintenance."""
        return self.capacity is not None and len(self.entries) > self.capacity

    @property
    def points(self) -> list[SparseVector]:
        return [e.point for e in self.entries]

    def betas(self) -> np.ndarray:
        """Raw coefficients (without the global scale)."""
        return np.fromiter(
            (e.beta for e in self.entries), dtype=np.float64, count=len(self.entries)
        )

    def effective_coefficients(self) -> np.ndarray:
        """Coefficients with the global scale applied."""
        return self.scale * self.betas()

    def effective(self, entry: ModelEntry) -> float:
        return self.scale * entry.beta

    def predict_margin(self, x: SparseVector) -> float:
        """f(x) = scale * sum_j beta_j k(x, x_j)."""
        if not self.entries:
            return 0.0
        row = kernel_row(self.spec, x, self.points)
        return self.scale * float(np.dot(self.betas(), row))

    def predict_margins(self, points, chunk_size: int = 2048) -> np.ndarray:
        """Batched margins for many points, one Gram block per chunk."""
        points = list(points)
        if not self.entries:
            return np.zeros(len(points))
        basis, betas = self.points, self.betas()
        out = np.empty(len(points))
        for start in range(0, len(points), chunk_size):
            block = points[start : start + chunk_size]
            out[start : start + len(block)] = gram_matrix(self.spec, block, basis) @ betas
        return self.scale * out

    def classify(self, x: SparseVector) -> int:
        """Sign of the margin; a margin of exactly zero maps to +1."""
        return 1 if self.predict_margin(x) >= 0.0 else -1

    def model_norm_sq(self) -> float:
        """||w||^2 = scale^2 * beta^T K beta, clamped at zero."""
        if not self.entries:
            return 0.0
        betas = self.betas()
        gram = gram_matrix(self.spec, self.points, self.points)
        value = self.scale**2 * float(betas @ gram @ betas)
        if value < 0.0:
            if value < -1e-9:
                logger.warning(f"Model norm evaluated to {value:.3e}")
            return 0.0
        return value

    def add_entry(self, beta: float, point: SparseVector, coalesce: bool = True) -> int:
        """Add the term beta * phi(point), with ``beta`` an effective coefficient.

        With ``coalesce`` on and a pristine entry for an identical point
        present, the coefficient is folded into that entry (which is dropped
        if it cancels). Terms below COEFFICIENT_FLOOR are never stored.
        Returns the number of entries afterwards.
        """
        if beta == 0.0:
            raise ValueError("Cannot add an entry with zero coefficient")
        raw = beta / self.scale
        if coalesce and point in self._pristine:
            entry = self._pristine[point]
            entry.beta += raw
            if abs(self.effective(entry)) < COEFFICIENT_FLOOR:
                self.remove_entry(entry)
            return len(self.entries)
        if abs(beta) < COEFFICIENT_FLOOR:
            return len(self.entries)

        entry = ModelEntry(raw, point)
        self.entries.append(entry)
        if coalesce:
            self._pristine[point] = entry
        return len(self.entries)

    def remove_entry(self, entry: ModelEntry) -> None:
        """Remove an entry (identity match)."""
        for slot, candidate in enumerate(self.entries):
            if candidate is entry:
                del self.entries[slot]
                break
        else:
            raise ValueError("Entry is not part of this model")
        if self._pristine.get(entry.point) is entry:
            del self._pristine[entry.point]

    def replace_pair(self, slot_a: int, slot_b: int, beta: float, point: SparseVector) -> None:
        """Replace two entries by one merged entry with effective coefficient ``beta``.

        The merged entry takes the lower slot; all other entries keep their
        objects and relative order.
        """
        if slot_a == slot_b:
            raise ValueError("Cannot merge an entry with itself")
        low, high = sorted((slot_a, slot_b))
        for slot in (low, high):
            entry = self.entries[slot]
            if self._pristine.get(entry.point) is entry:
                del self._pristine[entry.point]
        del self.entries[high]
        if abs(beta) < COEFFICIENT_FLOOR:
            del self.entries[low]
        else:
            self.entries[low] = ModelEntry(beta / self.scale, point, pristine=False)

    def scale_by(self, factor: float) -> None:
        """Multiply w by ``factor`` in O(1).

        A factor of zero empties the model. The scale is folded into the
        coefficients when it drops below SCALE_FLOOR.
        """
        if factor < 0.0:
            raise ValueError(f"Scale factor must be non-negative, got {factor}")
        if factor == 0.0:
            self.entries.clear()
            self._pristine.clear()
            self.scale = 1.0
            return
        self.scale *= factor
        if self.scale < SCALE_FLOOR:
            self.fold_scale()

    def fold_scale(self) -> None:
        """Push the global scale into the coefficients and reset it to 1."""
        for entry in list(self.entries):
            entry.beta *= self.scale
        self.scale = 1.0
        for entry in [e for e in self.entries if abs(e.beta) < COEFFICIENT_FLOOR]:
            self.remove_entry(entry)

    def pristine_entry(self, point: SparseVector) -> ModelEntry | None:
        return self._pristine.get(point)

    def copy(self) -> "BudgetModel":
        """Independent snapshot (points are immutable and shared)."""
        clone = BudgetModel(self.spec, self.capacity)
        clone.scale = self.scale
        mapping = {}
        for entry in self.entries:
            twin = ModelEntry(entry.beta, entry.point, entry.pristine)
            mapping[id(entry)] = twin
            clone.entries.append(twin)
        clone._pristine = {
            point: mapping[id(entry)] for point, entry in self._pristine.items()
        }
        return clone


@dataclass
class AlphaState:
    """Dual coefficients alpha in the box [0, C]^n."""

    alpha: np.ndarray
    C: float
    scale: float = field(default=1.0)

    @classmethod
    def zeros(cls, n: int, C: float) -> "AlphaState":
        if not C > 0:
            raise ValueError(f"C must be positive, got {C}")
        return cls(np.zeros(n), float(C))

    @property
    def n(self) -> int:
        return int(self.alpha.size)

    def values(self) -> np.ndarray:
        """Coefficients with the scale applied."""
        return self.scale * self.alpha

    def in_box(self) -> bool:
        values = self.values()
        return bool(np.all(values >= 0.0) and np.all(values <= self.C))

    def check_box(self, i: int) -> None:
        """Assert the box constraint for coordinate ``i``."""
        assert 0.0 <= self.alpha[i] <= self.C, (
            f"alpha[{i}] = {self.alpha[i]!r} left [0, {self.C!r}]"
        )

    def support(self) -> np.ndarray:
        """Indices with non-zero coefficient."""
        return np.flatnonzero(self.alpha)
