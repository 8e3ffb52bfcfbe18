"""Stochastic kernel SVM solvers on a shared epoch loop.

Dual solvers (BSCA, SCA) apply the clipped Newton step on a uniformly drawn
coordinate:

    delta = [alpha_i + (1 - y_i f(x_i)) / Q_ii]_0^C - alpha_i

Primal solvers (BSGD, SGD) apply the kernelized Pegasos update with learning
rate nC / t, which shrinks the model by (1 - 1/t) and, on a margin violation,
adds y_i nC / t phi(x_i).
"""

import logging
import time
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from budgetsvm.config import Algorithm, TrainConfig
from budgetsvm.models import AlphaState, BudgetModel, EpochRecord, SparseDataset
from budgetsvm.models.kernel import diagonal
from budgetsvm.training.maintenance import STRATEGIES, MaintenanceKind, MaintenanceReport
from budgetsvm.utils.rng import TRAIN_STREAM, stream

logger = logging.getLogger(__name__)

# Type alias for progress callback
ProgressCallback = Callable[[str], None]


class TrainingError(Exception):
    """Training could not be started."""

    pass


@dataclass
class StepCounters:
    """Step statistics since the last log row."""

    steps: int = 0
    violations: int = 0
    nonzero_steps: int = 0
    merges: int = 0
    removals: int = 0
    weight_degradation: float = 0.0

    @property
    def maintenance_events(self) -> int:
        return self.merges + self.removals

    def fraction(self, count: int) -> float:
        return count / self.steps if self.steps else 0.0


@dataclass(frozen=True)
class StepReport:
    """Outcome of one solver step."""

    index: int
    margin: float
    delta: float
    violated: bool
    maintenance: MaintenanceReport | None = None


@dataclass
class SolverState:
    """Everything a solver mutates during training.

    For the primal solvers ``alpha`` holds violation counts v_i with
    ``alpha.scale`` = nC / (t - 1), so ``alpha.values()`` are the dual
    coefficients of the current model.
    """

    model: BudgetModel
    alpha: AlphaState
    rng: np.random.Generator
    q_diag: np.ndarray
    coalesce: bool = True
    maintain: Callable[[BudgetModel, int], MaintenanceReport] = STRATEGIES["merge"]
    t: int = 1
    counters: StepCounters = field(default_factory=StepCounters)

    def reset_counters(self) -> StepCounters:
        finished, self.counters = self.counters, StepCounters()
        return finished

    def _maintain_if_needed(self) -> MaintenanceReport | None:
        if not self.model.over_budget:
            return None
        report = self.maintain(self.model, self.t)
        if report.kind is MaintenanceKind.MERGE:
            self.counters.merges += 1
        else:
            self.counters.removals += 1
        self.counters.weight_degradation += report.weight_degradation
        return report


def create_state(config: TrainConfig, ds: SparseDataset) -> SolverState:
    """Fresh solver state for a run: empty model, alpha = 0, seeded stream."""
    if ds.n < 1:
        raise TrainingError("Training set is empty")
    q_diag = np.array([diagonal(config.kernel, x) for x in ds.examples])
    if np.any(q_diag <= 0.0):
        raise TrainingError("Kernel diagonal must be positive (zero feature vector?)")
    return SolverState(
        model=BudgetModel(config.kernel, config.capacity),
        alpha=AlphaState.zeros(ds.n, config.C),
        rng=stream(config.seed, TRAIN_STREAM),
        q_diag=q_diag,
        coalesce=config.coalesce,
        maintain=STRATEGIES[config.maintenance],
    )


def _coordinate_step(state: SolverState, ds: SparseDataset, i: int) -> StepReport:
    x, y = ds.examples[i], float(ds.labels[i])
    alpha = state.alpha
    margin = state.model.predict_margin(x)
    old = float(alpha.alpha[i])
    updated = min(max(old + (1.0 - y * margin) / state.q_diag[i], 0.0), alpha.C)
    delta = updated - old
    violated = y * margin < 1.0

    state.counters.steps += 1
    state.counters.violations += violated
    report = None
    if delta != 0.0:
        state.counters.nonzero_steps += 1
        alpha.alpha[i] = updated
        if __debug__:
            alpha.check_box(i)
        state.model.add_entry(y * delta, x, state.coalesce)
        report = state._maintain_if_needed()
    state.t += 1
    return StepReport(i, margin, delta, violated, report)


def bsca_step(state: SolverState, ds: SparseDataset, i: int) -> StepReport:
    """One budgeted stochastic coordinate ascent step on coordinate ``i``."""
    return _coordinate_step(state, ds, i)


def sca_step(state: SolverState, ds: SparseDataset, i: int) -> StepReport:
    """One exact stochastic coordinate ascent step (model never maintained)."""
    if state.model.capacity is not None:
        raise TrainingError("Exact SCA requires an unbounded model")
    return _coordinate_step(state, ds, i)


def _gradient_step(state: SolverState, ds: SparseDataset, i: int) -> StepReport:
    x, y = ds.examples[i], float(ds.labels[i])
    t = state.t
    n, C = ds.n, state.alpha.C
    margin = state.model.predict_margin(x)
    violated = y * margin < 1.0

    state.model.scale_by(1.0 - 1.0 / t)
    state.counters.steps += 1
    report = None
    delta = 0.0
    counts = state.alpha
    if violated:
        delta = n * C / t
        state.counters.violations += 1
        state.counters.nonzero_steps += 1
        counts.alpha[i] += 1.0
        state.model.add_entry(y * delta, x, state.coalesce)
        report = state._maintain_if_needed()
    counts.scale = n * C / t
    state.t += 1
    return StepReport(i, margin, delta, violated, report)


def bsgd_step(state: SolverState, ds: SparseDataset, i: int) -> StepReport:
    """One budgeted stochastic gradient step on example ``i``."""
    return _gradient_step(state, ds, i)


def sgd_step(state: SolverState, ds: SparseDataset, i: int) -> StepReport:
    """One exact (kernelized Pegasos) stochastic gradient step."""
    if state.model.capacity is not None:
        raise TrainingError("Exact SGD requires an unbounded model")
    return _gradient_step(state, ds, i)


STEP_FUNCTIONS: dict[Algorithm, Callable[[SolverState, SparseDataset, int], StepReport]] = {
    Algorithm.BSCA: bsca_step,
    Algorithm.SCA: sca_step,
    Algorithm.BSGD: bsgd_step,
    Algorithm.SGD: sgd_step,
}

StepObserver = Callable[[SolverState, StepReport], None]


@dataclass
class TrainResult:
    """Final model, log rows and the solver state that produced them."""

    model: BudgetModel
    records: list[EpochRecord]
    state: SolverState
    maintenance_events: list[MaintenanceReport] = field(default_factory=list)


def run_epoch(
    state: SolverState,
    ds: SparseDataset,
    step: Callable[[SolverState, SparseDataset, int], StepReport],
    observer: StepObserver | None = None,
) -> list[MaintenanceReport]:
    """n i.i.d. uniform draws with replacement, one step each."""
    events = []
    for i in state.rng.integers(0, ds.n, size=ds.n).tolist():
        report = step(state, ds, i)
        if report.maintenance is not None:
            events.append(report.maintenance)
        if observer is not None:
            observer(state, report)
    return events


def train(
    config: TrainConfig,
    train_ds: SparseDataset,
    test_ds: SparseDataset,
    progress_callback: ProgressCallback | None = None,
    observer: StepObserver | None = None,
    keep_events: bool = False,
) -> TrainResult:
    """Run ``config.epochs`` epochs and log diagnostics every ``log_every`` epochs.

    The final epoch always gets a record, even when ``log_every`` does not
    divide ``epochs``.

    Identical (config, datasets) give bit-identical models and records
    (apart from wall_time_s when timing is on).

    Raises:
        TrainingError: If a dataset is empty or the kernel is degenerate
    """
    from budgetsvm.analysis.diagnostics import epoch_record

    if test_ds.n < 1:
        raise TrainingError("Test set is empty")

    state = create_state(config, train_ds)
    step = STEP_FUNCTIONS[config.algo]
    records: list[EpochRecord] = []
    events: list[MaintenanceReport] = []
    elapsed = 0.0

    logger.info(
        f"Training {config.algo.value}: n={train_ds.n}, C={config.C}, "
        f"{config.kernel.describe()}, budget={config.capacity}, epochs={config.epochs}"
    )
    for epoch in range(1, config.epochs + 1):
        started = time.perf_counter()
        epoch_events = run_epoch(state, train_ds, step, observer)
        elapsed += time.perf_counter() - started
        if keep_events:
            events.extend(epoch_events)

        if epoch % config.log_every == 0 or epoch == config.epochs:
            counters = state.reset_counters()
            record = epoch_record(
                epoch,
                elapsed if config.wall_time else 0.0,
                state,
                counters,
                train_ds,
                test_ds,
                config,
            )
            records.append(record)
            message = (
                f"epoch {epoch}: primal={record.primal_obj:.6g} dual={record.dual_obj:.6g} "
                f"acc={record.test_accuracy:.4f} sv={record.sv_count} "
                f"merge={record.merge_fraction:.4f} wd={counters.weight_degradation:.3e}"
            )
            logger.info(message)
            if progress_callback:
                progress_callback(message)

    return TrainResult(state.model, records, state, events)
