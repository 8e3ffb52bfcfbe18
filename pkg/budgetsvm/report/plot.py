"""Static SVG plots of a training log."""

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from budgetsvm.models import EpochRecord  # noqa: E402

logger = logging.getLogger(__name__)

# Golden-ratio aspect at single-column width
FIG_WIDTH = 6.0
FIG_HEIGHT = FIG_WIDTH * 0.618


def _clean_axes(ax) -> None:
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    ax.xaxis.set_ticks_position("bottom")
    ax.yaxis.set_ticks_position("left")


def plot_records(records: list[EpochRecord], path: str | Path, title: str | None = None) -> Path:
    """Primal/dual objective and test accuracy against epoch, as SVG.

    Both panels use plain linear axes. The file carries no date metadata, so
    identical logs give identical files.
    """
    if not records:
        raise ValueError("No records to plot")
    path = Path(path)
    epochs = [r.epoch for r in records]

    with plt.rc_context({"svg.hashsalt": "budgetsvm", "font.size": 9}):
        fig, (obj_ax, acc_ax) = plt.subplots(2, 1, sharex=True, figsize=(FIG_WIDTH, 2 * FIG_HEIGHT))
        obj_ax.plot(epochs, [r.primal_obj for r in records], marker="o", label="primal")
        obj_ax.plot(epochs, [r.dual_obj for r in records], marker="s", label="dual")
        obj_ax.set_ylabel("objective")
        obj_ax.legend(frameon=False)

        acc_ax.plot(epochs, [r.test_accuracy for r in records], marker="o", color="tab:green")
        acc_ax.set_ylabel("test accuracy")
        acc_ax.set_xlabel("epoch")

        for ax in (obj_ax, acc_ax):
            _clean_axes(ax)
        if title:
            obj_ax.set_title(title)

        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)

    logger.info(f"Wrote plot to {path}")
    return path
