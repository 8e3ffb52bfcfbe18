"""Rich console tables for run summaries and verification results."""

from rich.console import Console
from rich.table import Table

from budgetsvm.analysis.verify import SuiteResult
from budgetsvm.models import EpochRecord


def suite_table(result: SuiteResult) -> Table:
    verdict = "[green]PASS[/green]" if result.passed else "[red]FAIL[/red]"
    table = Table(title=f"verify {result.suite}: {verdict}")
    table.add_column("check")
    table.add_column("measured", justify="right")
    table.add_column("threshold", justify="right")
    table.add_column("result")
    for check in result.checks:
        table.add_row(
            check.name,
            f"{check.measured:.3e}",
            f"{check.threshold:.3e}",
            "[green]pass[/green]" if check.passed else "[red]fail[/red]",
        )
    return table


def summary_table(records: list[EpochRecord], title: str = "training") -> Table:
    """One row per logged epoch."""
    table = Table(title=title)
    table.add_column("epoch", justify="right")
    table.add_column("primal", justify="right")
    table.add_column("dual", justify="right")
    table.add_column("accuracy", justify="right")
    table.add_column("SVs", justify="right")
    table.add_column("merge frac", justify="right")
    for record in records:
        table.add_row(
            str(record.epoch),
            f"{record.primal_obj:.6g}",
            f"{record.dual_obj:.6g}",
            f"{record.test_accuracy:.4f}",
            str(record.sv_count),
            f"{record.merge_fraction:.4f}",
        )
    return table


def print_suite(result: SuiteResult, console: Console | None = None) -> None:
    (console or Console()).print(suite_table(result))


def print_summary(records: list[EpochRecord], title: str = "training", console: Console | None = None) -> None:
    (console or Console(stderr=True)).print(summary_table(records, title))
