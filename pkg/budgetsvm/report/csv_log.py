"""CSV training logs.

Rows are written with ``\\n`` line endings and 17 significant digits so
that two identical runs produce identical bytes.
"""

import csv
import logging
from pathlib import Path

from budgetsvm.models import EpochRecord
from budgetsvm.training.maintenance import MaintenanceReport

logger = logging.getLogger(__name__)

MAINTENANCE_HEADER = ["step", "kind", "weight_degradation", "h"]


def write_records(records: list[EpochRecord], path: str | Path) -> None:
    """Write the epoch log, header first."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(EpochRecord.header())
        for record in records:
            writer.writerow(record.as_row())
    logger.info(f"Wrote {len(records)} records to {path}")


def read_records(path: str | Path) -> list[EpochRecord]:
    """Read an epoch log written by ``write_records``."""
    with open(path, newline="", encoding="utf-8") as f:
        return [EpochRecord.from_row(row) for row in csv.DictReader(f)]


def write_maintenance_log(events: list[MaintenanceReport], path: str | Path) -> None:
    """One row per maintenance event; ``h`` is empty for removals."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(MAINTENANCE_HEADER)
        for event in events:
            writer.writerow(
                [
                    event.step,
                    event.kind.value,
                    format(event.weight_degradation, ".17g"),
                    "" if event.h is None else format(event.h, ".17g"),
                ]
            )
    logger.info(f"Wrote {len(events)} maintenance events to {path}")


def maintenance_log_path(out: str | Path) -> Path:
    """``run.csv`` -> ``run_maintenance.csv``."""
    out = Path(out)
    return out.with_name(f"{out.stem}_maintenance{out.suffix or '.csv'}")


def sweep_output_path(out: str | Path, budget: int) -> Path:
    """``run.csv`` -> ``run_B500.csv``."""
    out = Path(out)
    return out.with_name(f"{out.stem}_B{budget}{out.suffix or '.csv'}")
