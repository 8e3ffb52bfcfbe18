"""Output writers: CSV logs, plots and console tables."""

from budgetsvm.report.csv_log import (
    MAINTENANCE_HEADER,
    maintenance_log_path,
    read_records,
    sweep_output_path,
    write_maintenance_log,
    write_records,
)

__all__ = [
    "MAINTENANCE_HEADER",
    "maintenance_log_path",
    "read_records",
    "sweep_output_path",
    "write_maintenance_log",
    "write_records",
]
