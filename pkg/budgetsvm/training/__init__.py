"""Solvers and budget maintenance."""

from budgetsvm.training.maintenance import (
    BudgetError,
    MaintenanceKind,
    MaintenanceReport,
    MergeCandidate,
    golden_section_h,
    merged_beta_closed_form,
    remove_smallest,
    select_and_merge,
    weight_degradation,
)
from budgetsvm.training.solvers import (
    SolverState,
    StepReport,
    TrainingError,
    TrainResult,
    bsca_step,
    bsgd_step,
    create_state,
    sca_step,
    sgd_step,
    train,
)

__all__ = [
    "BudgetError",
    "MaintenanceKind",
    "MaintenanceReport",
    "MergeCandidate",
    "golden_section_h",
    "merged_beta_closed_form",
    "remove_smallest",
    "select_and_merge",
    "weight_degradation",
    "SolverState",
    "StepReport",
    "TrainingError",
    "TrainResult",
    "bsca_step",
    "bsgd_step",
    "create_state",
    "sca_step",
    "sgd_step",
    "train",
]
