"""Tests for CSV logs, plots and console tables."""

from pathlib import Path

from rich.console import Console

from budgetsvm.analysis.verify import SuiteResult
from budgetsvm.models import EpochRecord
from budgetsvm.report import (
    maintenance_log_path,
    read_records,
    sweep_output_path,
    write_maintenance_log,
    write_records,
)
from budgetsvm.report.console import print_suite, summary_table
from budgetsvm.report.plot import plot_records
from budgetsvm.training import MaintenanceKind, MaintenanceReport

HEADER = (
    "epoch,wall_time_s,primal_obj,dual_obj,test_accuracy,sv_count,"
    "merge_fraction,violation_fraction,nonzero_step_fraction"
)


def records():
    return [
        EpochRecord(1, 0.0, 0.9, 0.1, 0.75, 10, 0.5, 0.4, 0.6),
        EpochRecord(2, 0.0, 0.7, 0.3, 1.0 / 3.0, 12, 0.25, 0.3, 0.5),
    ]


class TestCsvLog:
    """Tests for the epoch CSV."""

    def test_header(self, tmp_path):
        """Test the exact header line."""
        path = tmp_path / "run.csv"
        write_records(records(), path)
        assert path.read_text().splitlines()[0] == HEADER

    def test_header_is_diagnostics_only(self):
        """Test the epoch log carries the nine diagnostics columns and nothing else."""
        assert len(EpochRecord.header()) == 9
        assert "weight_degradation" not in EpochRecord.header()

    def test_row_format(self, tmp_path):
        """Test 17 significant digits and integer columns."""
        path = tmp_path / "run.csv"
        write_records(records(), path)
        second = path.read_text().splitlines()[2]
        assert second.startswith("2,0,0.69999999999999996,")
        assert ",0.33333333333333331,12," in second

    def test_round_trip(self, tmp_path):
        """Test records read back equal the written ones."""
        path = tmp_path / "run.csv"
        write_records(records(), path)
        assert read_records(path) == records()

    def test_unix_line_endings(self, tmp_path):
        """Test rows end with a bare newline."""
        path = tmp_path / "run.csv"
        write_records(records(), path)
        assert b"\r" not in path.read_bytes()

    def test_maintenance_log(self, tmp_path):
        """Test maintenance rows, with an empty h for removals."""
        events = [
            MaintenanceReport(MaintenanceKind.MERGE, 0, 3, 0.5, 0.25, 17),
            MaintenanceReport(MaintenanceKind.REMOVE, 2, None, 0.125, None, 20),
        ]
        path = tmp_path / "run_maintenance.csv"
        write_maintenance_log(events, path)
        assert path.read_text().splitlines() == [
            "step,kind,weight_degradation,h",
            "17,merge,0.5,0.25",
            "20,remove,0.125,",
        ]

    def test_paths(self):
        """Test derived output names."""
        assert maintenance_log_path("out/run.csv") == Path("out/run_maintenance.csv")
        assert sweep_output_path("out/run.csv", 500) == Path("out/run_B500.csv")


class TestPlot:
    """Tests for plot_records."""

    def test_writes_svg(self, tmp_path):
        """Test an SVG file is produced."""
        path = plot_records(records(), tmp_path / "run.svg", title="bsca")
        assert path.exists()
        assert "<svg" in path.read_text()

    def test_deterministic(self, tmp_path):
        """Test two renders of the same log are identical."""
        a = plot_records(records(), tmp_path / "a.svg")
        b = plot_records(records(), tmp_path / "b.svg")
        assert a.read_bytes() == b.read_bytes()


class TestConsole:
    """Tests for the rich tables."""

    def test_suite_table(self):
        """Test a verify result renders with its verdict."""
        result = SuiteResult("lemma1")
        result.add("max |dD - J|", 1e-14, 1e-10)
        console = Console(record=True, width=100)
        print_suite(result, console)
        text = console.export_text()
        assert "PASS" in text
        assert "lemma1" in text

    def test_summary_table(self):
        """Test one row per record."""
        assert summary_table(records()).row_count == 2
