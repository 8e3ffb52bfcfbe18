"""Objectives, progress measures and convergence predictions.

Everything here is pure evaluation over snapshots of a model or of the
dual coefficients; nothing mutates solver state.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from budgetsvm.config import TrainConfig
from budgetsvm.models import (
    AlphaState,
    BudgetModel,
    EpochRecord,
    KernelSpec,
    SparseDataset,
    gram_matrix,
    kernel_eval,
    kernel_row,
    q_matrix,
)
from budgetsvm.training.solvers import SolverState, StepCounters, bsca_step, create_state

logger = logging.getLogger(__name__)

# Dense-Q diagnostics are refused above this size
MAX_DENSE_N = 500

# Smallest eigenvalue below which Q is treated as singular
KAPPA_FLOOR = 1e-10

# Exact progress below this share of the largest one counts as zero
PROGRESS_FLOOR = 1e-10

# Free/bound tolerance for the step-fraction predictions, relative to C
BOUND_TOLERANCE = 1e-6


class DiagnosticsError(Exception):
    """A diagnostic cannot be evaluated for this input."""

    pass


@dataclass
class DiagnosticsReport:
    """Small-instance convergence diagnostics."""

    kappa: float
    E_trace: list[float] = field(default_factory=list)
    bound_trace: list[float] = field(default_factory=list)
    p_sgd_pred: float = 0.0
    p_sca_pred: float = 0.0

    @property
    def kappa_degenerate(self) -> bool:
        return self.kappa <= KAPPA_FLOOR


def hinge_losses(margins: np.ndarray, labels: np.ndarray) -> np.ndarray:
    return np.maximum(0.0, 1.0 - labels * margins)


def primal_objective(m: BudgetModel, ds: SparseDataset, C: float) -> float:
    """P(w) = lambda/2 ||w||^2 + mean hinge loss, with lambda = 1 / (nC)."""
    lam = 1.0 / (ds.n * C)
    margins = m.predict_margins(ds.examples)
    return 0.5 * lam * m.model_norm_sq() + float(np.mean(hinge_losses(margins, ds.labels)))


def dual_objective(
    alpha: AlphaState | np.ndarray,
    ds: SparseDataset,
    spec: KernelSpec,
    chunk_size: int = 1024,
) -> float:
    """D(alpha) = sum(alpha) - 1/2 alpha^T Q alpha over the non-zero coordinates."""
    values = alpha.values() if isinstance(alpha, AlphaState) else np.asarray(alpha, dtype=np.float64)
    support = np.flatnonzero(values)
    if support.size == 0:
        return 0.0
    coef = values[support] * ds.labels[support]
    points = [ds.examples[s] for s in support]
    quad = 0.0
    for start in range(0, support.size, chunk_size):
        block = points[start : start + chunk_size]
        quad += float(coef[start : start + len(block)] @ (gram_matrix(spec, block, points) @ coef))
    return float(values[support].sum()) - 0.5 * quad


def q_row_dot(alpha: np.ndarray, ds: SparseDataset, spec: KernelSpec, i: int) -> float:
    """(Q alpha)_i = y_i sum_j alpha_j y_j k(x_i, x_j) over the support."""
    support = np.flatnonzero(alpha)
    if support.size == 0:
        return 0.0
    row = kernel_row(spec, ds.examples[i], [ds.examples[s] for s in support])
    return float(ds.labels[i] * np.dot(alpha[support] * ds.labels[support], row))


def progress_J(
    alpha: np.ndarray, ds: SparseDataset, spec: KernelSpec, i: int, delta: float
) -> float:
    """Exact change of D when coordinate ``i`` moves by ``delta``.

    J = Q_ii / 2 * ((g / Q_ii)^2 - (delta - g / Q_ii)^2), g = 1 - (Q alpha)_i.
    """
    q_ii = kernel_eval(spec, ds.examples[i], ds.examples[i])
    newton = (1.0 - q_row_dot(np.asarray(alpha, dtype=np.float64), ds, spec, i)) / q_ii
    return 0.5 * q_ii * (newton * newton - (delta - newton) ** 2)


def _clipped_steps(alpha: np.ndarray, newton: np.ndarray, C: float) -> np.ndarray:
    return np.clip(alpha + newton, 0.0, C) - alpha


def relative_approx_error(
    alpha: np.ndarray,
    model_exact_margins: np.ndarray,
    model_budget_margins: np.ndarray,
    ds: SparseDataset,
    C: float,
    q_diag: np.ndarray | None = None,
) -> float:
    """1 - max_i J(alpha, i, budget step) / J(alpha, i, exact step).

    Indices whose exact step makes no progress are skipped (J = 0, or below
    PROGRESS_FLOOR times the largest J, where the ratio is rounding noise);
    when all are skipped the result is 0.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    q = np.ones(ds.n) if q_diag is None else np.asarray(q_diag)
    newton = (1.0 - ds.labels * np.asarray(model_exact_margins)) / q
    newton_budget = (1.0 - ds.labels * np.asarray(model_budget_margins)) / q
    delta = _clipped_steps(alpha, newton, C)
    delta_budget = _clipped_steps(alpha, newton_budget, C)
    j_exact = 0.5 * q * (newton**2 - (delta - newton) ** 2)
    j_budget = 0.5 * q * (newton**2 - (delta_budget - newton) ** 2)
    usable = j_exact > PROGRESS_FLOOR * max(float(np.max(j_exact)), 0.0)
    if not np.any(usable):
        return 0.0
    return 1.0 - float(np.max(j_budget[usable] / j_exact[usable]))


def smallest_eigenvalue_Q(ds: SparseDataset, spec: KernelSpec) -> float:
    """Smallest eigenvalue kappa of Q (dense, so only for n <= 500).

    A warning is logged when kappa <= KAPPA_FLOOR (e.g. duplicated points).

    Raises:
        DiagnosticsError: If the dataset is too large
    """
    if ds.n > MAX_DENSE_N:
        raise DiagnosticsError(
            f"Smallest eigenvalue needs a dense Q; n={ds.n} exceeds {MAX_DENSE_N}"
        )
    q = q_matrix(ds, spec)
    kappa = float(scipy.linalg.eigh(q, eigvals_only=True, subset_by_index=[0, 0])[0])
    if kappa <= KAPPA_FLOOR:
        logger.warning(
            f"Q is not strictly positive definite (kappa={kappa:.3e}); "
            "convergence bounds do not apply"
        )
    return kappa


def lemma2_predictions(alpha_star: np.ndarray, C: float) -> tuple[float, float]:
    """Predicted long-run step fractions (p_sgd, p_sca) from an optimal alpha.

    p_sgd is the mean of alpha_i / C; p_sca the share of free variables
    0 < alpha_i < C, using a tolerance of BOUND_TOLERANCE * C.
    """
    alpha_star = np.asarray(alpha_star, dtype=np.float64)
    tol = BOUND_TOLERANCE * C
    p_sgd = float(np.mean(alpha_star) / C)
    free = (alpha_star > tol) & (alpha_star < C - tol)
    p_sca = float(np.mean(free))
    return min(max(p_sgd, 0.0), 1.0), p_sca


def theorem1_bound(
    D_star: float, n: int, C: float, kappa: float, E_trace
) -> list[float]:
    """Suboptimality bound after each iteration.

    Element t is (D* + nC^2/2) * prod_{tau <= t} (1 - 2 kappa (1 - E_tau) / ((1 + kappa) n)),
    so element 0 is the initial bound. E values are clamped to [0, 1].

    Raises:
        DiagnosticsError: If kappa is not positive
    """
    if not kappa > 0:
        raise DiagnosticsError(f"Bound requires kappa > 0, got {kappa}")
    rate = 2.0 * kappa / ((1.0 + kappa) * n)
    clamped = np.clip(np.asarray(E_trace, dtype=np.float64), 0.0, 1.0)
    factors = 1.0 - rate * (1.0 - clamped)
    start = D_star + 0.5 * n * C * C
    return [start] + (start * np.cumprod(factors)).tolist()


def test_accuracy(m: BudgetModel, test: SparseDataset) -> float:
    """Fraction of test points classified correctly (margin 0 counts as +1)."""
    if test.n == 0:
        raise DiagnosticsError("Test set is empty")
    predictions = np.where(m.predict_margins(test.examples) >= 0.0, 1.0, -1.0)
    return float(np.mean(predictions == test.labels))


# Not a pytest test despite the name
test_accuracy.__test__ = False


def epoch_record(
    epoch: int,
    wall_time_s: float,
    state: SolverState,
    counters: StepCounters,
    train: SparseDataset,
    test: SparseDataset,
    config: TrainConfig,
) -> EpochRecord:
    """Package the diagnostics for one logged epoch."""
    return EpochRecord(
        epoch=epoch,
        wall_time_s=wall_time_s,
        primal_obj=primal_objective(state.model, train, config.C),
        dual_obj=dual_objective(state.alpha, train, config.kernel),
        test_accuracy=test_accuracy(state.model, test),
        sv_count=len(state.model),
        merge_fraction=counters.fraction(counters.maintenance_events),
        violation_fraction=counters.fraction(counters.violations),
        nonzero_step_fraction=counters.fraction(counters.nonzero_steps),
    )


@dataclass
class BscaTrace:
    """Per-iteration approximation error and checkpointed dual values of one run."""

    E_trace: list[float]
    checkpoints: list[int]
    dual_values: list[float]


def bsca_trace(
    ds: SparseDataset,
    config: TrainConfig,
    Q: np.ndarray,
    checkpoint_every: int | None = None,
) -> BscaTrace:
    """Run BSCA step by step, recording E(w, w~) before every iteration.

    ``Q`` is the dense kernel-label matrix of ``ds``; D(alpha) is recorded at
    t = 0 and every ``checkpoint_every`` iterations (default: every epoch).

    Raises:
        DiagnosticsError: If the dataset is too large for dense evaluation
    """
    if ds.n > MAX_DENSE_N:
        raise DiagnosticsError(
            f"Approximation-error traces need exact margins; n={ds.n} exceeds {MAX_DENSE_N}"
        )
    every = checkpoint_every or ds.n
    state = create_state(config, ds)
    q_diag = np.diag(Q).copy()
    E_trace: list[float] = []
    checkpoints = [0]
    dual_values = [0.0]

    t = 0
    for _ in range(config.epochs):
        for i in state.rng.integers(0, ds.n, size=ds.n).tolist():
            alpha = state.alpha.alpha
            exact = ds.labels * (Q @ alpha)
            budget = state.model.predict_margins(ds.examples)
            E_trace.append(relative_approx_error(alpha, exact, budget, ds, config.C, q_diag))
            bsca_step(state, ds, i)
            t += 1
            if t % every == 0:
                checkpoints.append(t)
                alpha = state.alpha.alpha
                dual_values.append(float(alpha.sum() - 0.5 * alpha @ Q @ alpha))
    return BscaTrace(E_trace, checkpoints, dual_values)


def diagnostics_report(
    ds: SparseDataset,
    config: TrainConfig,
    Q: np.ndarray,
    D_star: float,
    alpha_star: np.ndarray,
    kappa: float | None = None,
) -> tuple[DiagnosticsReport, BscaTrace]:
    """Trace one BSCA run and package kappa, E, the bound and the step predictions.

    ``D_star`` and ``alpha_star`` come from an exact solve of the same instance.
    The bound trace is left empty when Q is not strictly positive definite.
    """
    if kappa is None:
        kappa = smallest_eigenvalue_Q(ds, config.kernel)
    trace = bsca_trace(ds, config, Q)
    bound = theorem1_bound(D_star, ds.n, config.C, kappa, trace.E_trace) if kappa > KAPPA_FLOOR else []
    p_sgd, p_sca = lemma2_predictions(alpha_star, config.C)
    report = DiagnosticsReport(
        kappa=kappa, E_trace=trace.E_trace, bound_trace=bound, p_sgd_pred=p_sgd, p_sca_pred=p_sca
    )
    return report, trace
