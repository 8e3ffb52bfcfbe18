"""Budget maintenance: merging two support vectors into one.

For two terms beta_i phi(x_i) + beta_j phi(x_j) the merged point is
x' = (1 - h) x_i + h x_j. For fixed x' the best coefficient is the
least-squares solution

    beta' = (beta_i k(x_i, x') + beta_j k(x_j, x')) / k(x', x')

and the weight degradation is

    WD = beta_i^2 k_ii + beta_j^2 k_jj + 2 beta_i beta_j k_ij - beta'^2 k(x', x').

Minimizing WD over h is therefore maximizing |beta'(h)| (times sqrt k(x', x')),
which is done by a bounded scalar search on [0, 1].
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

from scipy.optimize import minimize_scalar

from budgetsvm.models import BudgetModel, KernelKind, KernelSpec, SparseVector, kernel_eval
from budgetsvm.models.sparse import squared_distance

logger = logging.getLogger(__name__)

# Absolute tolerance on h for the bounded minimization
H_TOLERANCE = 1e-3


class BudgetError(Exception):
    """Budget maintenance called outside its contract."""

    pass


class MaintenanceKind(Enum):
    """What a maintenance event did."""

    MERGE = "merge"
    REMOVE = "remove"


@dataclass(frozen=True)
class MergeCandidate:
    """Result of merging the entries in slots ``i`` and ``j``."""

    i: int
    j: int
    h: float
    merged_point: SparseVector
    merged_beta: float
    weight_degradation: float


@dataclass(frozen=True)
class MaintenanceReport:
    """One maintenance event."""

    kind: MaintenanceKind
    slot: int
    partner: int | None
    weight_degradation: float
    h: float | None = None
    step: int = 0


def convex_combination(x_i: SparseVector, x_j: SparseVector, h: float) -> SparseVector:
    """(1 - h) x_i + h x_j; the endpoints return the original objects."""
    if h == 0.0:
        return x_i
    if h == 1.0:
        return x_j
    return x_i.combine(x_j, 1.0 - h, h)


def merged_beta_closed_form(
    beta_i: float, beta_j: float, k_i: float, k_j: float, k_self: float
) -> float:
    """Optimal merged coefficient for a fixed merged point."""
    if not k_self > 0:
        raise ValueError(f"k(x', x') must be positive, got {k_self}")
    return (beta_i * k_i + beta_j * k_j) / k_self


def _degradation(
    beta_i: float,
    beta_j: float,
    k_ii: float,
    k_jj: float,
    k_ij: float,
    merged_beta: float,
    k_self: float,
) -> float:
    value = (
        beta_i * beta_i * k_ii
        + beta_j * beta_j * k_jj
        + 2.0 * beta_i * beta_j * k_ij
        - merged_beta * merged_beta * k_self
    )
    return value if value > 0.0 else 0.0


def weight_degradation(
    beta_i: float,
    beta_j: float,
    x_i: SparseVector,
    x_j: SparseVector,
    x_prime: SparseVector,
    spec: KernelSpec,
) -> float:
    """||beta_i phi(x_i) + beta_j phi(x_j) - beta' phi(x')||^2 with the optimal beta'."""
    k_i = kernel_eval(spec, x_i, x_prime)
    k_j = kernel_eval(spec, x_j, x_prime)
    k_self = kernel_eval(spec, x_prime, x_prime)
    merged = merged_beta_closed_form(beta_i, beta_j, k_i, k_j, k_self)
    return _degradation(
        beta_i,
        beta_j,
        kernel_eval(spec, x_i, x_i),
        kernel_eval(spec, x_j, x_j),
        kernel_eval(spec, x_i, x_j),
        merged,
        k_self,
    )


class _MergeProfile:
    """beta'(h) and WD(h) along the segment between two points."""

    def __init__(self, beta_i: float, beta_j: float, x_i: SparseVector, x_j: SparseVector, spec: KernelSpec):
        self.beta_i = beta_i
        self.beta_j = beta_j
        self.x_i = x_i
        self.x_j = x_j
        self.spec = spec
        self.k_ii = kernel_eval(spec, x_i, x_i)
        self.k_jj = kernel_eval(spec, x_j, x_j)
        self.k_ij = kernel_eval(spec, x_i, x_j)
        self.dist_sq = squared_distance(x_i, x_j)

    def point(self, h: float) -> SparseVector:
        return convex_combination(self.x_i, self.x_j, h)

    def kernels(self, h: float) -> tuple[float, float, float]:
        """(k(x_i, x'), k(x_j, x'), k(x', x')) for x' = x'(h)."""
        if self.spec.kind is KernelKind.GAUSSIAN:
            # ||x_i - x'|| = h ||x_i - x_j||, ||x_j - x'|| = (1 - h) ||x_i - x_j||
            gamma_d = self.spec.gamma * self.dist_sq
            return math.exp(-gamma_d * h * h), math.exp(-gamma_d * (1.0 - h) ** 2), 1.0
        x_prime = self.point(h)
        return (
            kernel_eval(self.spec, self.x_i, x_prime),
            kernel_eval(self.spec, self.x_j, x_prime),
            kernel_eval(self.spec, x_prime, x_prime),
        )

    def evaluate(self, h: float) -> tuple[float, float]:
        """(beta', WD) at h."""
        k_i, k_j, k_self = self.kernels(h)
        if k_self <= 0.0:
            # Degenerate merged point (zero vector under the linear kernel)
            return 0.0, _degradation(self.beta_i, self.beta_j, self.k_ii, self.k_jj, self.k_ij, 0.0, 1.0)
        merged = merged_beta_closed_form(self.beta_i, self.beta_j, k_i, k_j, k_self)
        wd = _degradation(self.beta_i, self.beta_j, self.k_ii, self.k_jj, self.k_ij, merged, k_self)
        return merged, wd


def golden_section_h(
    beta_i: float,
    beta_j: float,
    x_i: SparseVector,
    x_j: SparseVector,
    spec: KernelSpec,
) -> tuple[float, float, float]:
    """Find the convex-combination weight h minimizing the weight degradation.

    Bounded scalar minimization over [0, 1] (golden-section steps with
    parabolic interpolation) to an absolute tolerance of H_TOLERANCE; the
    endpoints are compared too, so the result is never worse than h = 0 or
    h = 1.

    Returns:
        (h, beta', WD)
    """
    if beta_i * beta_j < 0.0:
        raise BudgetError("Only coefficients of the same sign can be merged")

    profile = _MergeProfile(beta_i, beta_j, x_i, x_j, spec)
    result = minimize_scalar(
        lambda h: profile.evaluate(h)[1],
        bounds=(0.0, 1.0),
        method="bounded",
        options={"xatol": H_TOLERANCE},
    )

    best_h = float(result.x)
    best_beta, best_wd = profile.evaluate(best_h)
    for h in (0.0, 1.0):
        beta, wd = profile.evaluate(h)
        if wd <= best_wd:
            best_h, best_beta, best_wd = h, beta, wd
    return best_h, best_beta, best_wd


def merge_candidate(model: BudgetModel, i: int, j: int) -> MergeCandidate:
    """Best merge of the entries in slots ``i`` and ``j`` (effective coefficients)."""
    entry_i, entry_j = model.entries[i], model.entries[j]
    beta_i, beta_j = model.effective(entry_i), model.effective(entry_j)
    h, merged_beta, wd = golden_section_h(
        beta_i, beta_j, entry_i.point, entry_j.point, model.spec
    )
    point = convex_combination(entry_i.point, entry_j.point, h)
    return MergeCandidate(i, j, h, point, merged_beta, wd)


def smallest_entry(model: BudgetModel) -> int:
    """Slot with the smallest |coefficient|, lowest slot on ties."""
    coefficients = [abs(e.beta) for e in model.entries]
    return coefficients.index(min(coefficients))


def select_and_merge(model: BudgetModel, step: int = 0) -> MaintenanceReport:
    """Shrink a model of B + 1 entries back to B.

    The entry with the smallest |coefficient| is merged with the same-sign
    partner that yields the lowest weight degradation. Without a same-sign
    partner the entry is removed instead.

    Raises:
        BudgetError: If the model is not over budget
    """
    if not model.over_budget:
        raise BudgetError(
            f"Maintenance requires {model.capacity} + 1 entries, model has {len(model)}"
        )

    target = smallest_entry(model)
    sign = math.copysign(1.0, model.entries[target].beta)

    best: MergeCandidate | None = None
    for slot, entry in enumerate(model.entries):
        if slot == target or math.copysign(1.0, entry.beta) != sign:
            continue
        candidate = merge_candidate(model, target, slot)
        if best is None or candidate.weight_degradation < best.weight_degradation:
            best = candidate

    if best is None:
        return remove_smallest(model, step, slot=target)

    model.replace_pair(best.i, best.j, best.merged_beta, best.merged_point)
    logger.debug(
        f"step {step}: merged slots {best.i} and {best.j} at h={best.h:.4f}, "
        f"WD={best.weight_degradation:.3e}"
    )
    return MaintenanceReport(
        MaintenanceKind.MERGE, best.i, best.j, best.weight_degradation, best.h, step
    )


def remove_smallest(model: BudgetModel, step: int = 0, slot: int | None = None) -> MaintenanceReport:
    """Drop the smallest-|coefficient| entry (or the given slot).

    The weight degradation of a removal is beta^2 k(x, x).
    """
    if not model.over_budget:
        raise BudgetError(
            f"Maintenance requires {model.capacity} + 1 entries, model has {len(model)}"
        )
    if slot is None:
        slot = smallest_entry(model)
    entry = model.entries[slot]
    beta = model.effective(entry)
    wd = beta * beta * kernel_eval(model.spec, entry.point, entry.point)
    model.remove_entry(entry)
    logger.debug(f"step {step}: removed slot {slot}, WD={wd:.3e}")
    return MaintenanceReport(MaintenanceKind.REMOVE, slot, None, wd, None, step)


STRATEGIES = {
    "merge": select_and_merge,
    "remove": remove_smallest,
}
