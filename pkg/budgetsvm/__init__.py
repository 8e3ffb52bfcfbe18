"""budgetsvm - Kernel SVM training on a budget."""

__version__ = "0.1.0"
