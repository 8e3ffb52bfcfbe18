"""Domain types for budgeted SVM training."""

from budgetsvm.models.sparse import SparseVector, sparse_dot, squared_distance
from budgetsvm.models.dataset import SparseDataset
from budgetsvm.models.kernel import (
    KernelKind,
    KernelSpec,
    gram_matrix,
    kernel_eval,
    kernel_row,
    q_matrix,
)
from budgetsvm.models.budget import AlphaState, BudgetModel, ModelEntry
from budgetsvm.models.records import EpochRecord

__all__ = [
    "SparseVector",
    "sparse_dot",
    "squared_distance",
    "SparseDataset",
    "KernelKind",
    "KernelSpec",
    "gram_matrix",
    "kernel_eval",
    "kernel_row",
    "q_matrix",
    "AlphaState",
    "BudgetModel",
    "ModelEntry",
    "EpochRecord",
]
