"""Per-epoch diagnostic records."""

from dataclasses import astuple, dataclass, fields


@dataclass(frozen=True)
class EpochRecord:
    """One row of the training log."""

    epoch: int
    wall_time_s: float
    primal_obj: float
    dual_obj: float
    test_accuracy: float
    sv_count: int
    merge_fraction: float
    violation_fraction: float
    nonzero_step_fraction: float

    @classmethod
    def header(cls) -> list[str]:
        """Column names in CSV order."""
        return [f.name for f in fields(cls)]

    def as_row(self) -> list[str]:
        """CSV cells; floats carry 17 significant digits."""
        return [
            str(value) if isinstance(value, int) else format(value, ".17g")
            for value in astuple(self)
        ]

    @classmethod
    def from_row(cls, row: dict[str, str]) -> "EpochRecord":
        """Parse a CSV row produced by ``as_row``."""
        kwargs = {}
        for f in fields(cls):
            if f.name not in row:
                continue
            kwargs[f.name] = int(row[f.name]) if f.type in (int, "int") else float(row[f.name])
        return cls(**kwargs)
