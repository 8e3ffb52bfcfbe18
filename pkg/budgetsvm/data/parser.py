"""Reading and writing the sparse ``<label> <idx>:<val> ...`` text format."""

import logging
import math
from collections.abc import Iterable
from pathlib import Path

import numpy as np

from budgetsvm.models import SparseDataset, SparseVector

logger = logging.getLogger(__name__)


class DatasetFormatError(Exception):
    """The file as a whole is not a valid binary dataset."""

    pass


class DatasetParseError(DatasetFormatError):
    """A single line could not be parsed."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def _parse_number(token: str, line_number: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise DatasetParseError(line_number, f"non-numeric {what} '{token}'")
    if not math.isfinite(value):
        raise DatasetParseError(line_number, f"non-finite {what} '{token}'")
    return value


def _parse_line(line: str, line_number: int) -> tuple[float, SparseVector]:
    """Parse one data line into (raw label, features)."""
    tokens = line.split()
    raw_label = _parse_number(tokens[0], line_number, "label")

    pairs: list[tuple[int, float]] = []
    seen: set[int] = set()
    for token in tokens[1:]:
        idx_text, sep, value_text = token.partition(":")
        if not sep:
            raise DatasetParseError(line_number, f"expected idx:val, got '{token}'")
        try:
            idx = int(idx_text)
        except ValueError:
            raise DatasetParseError(line_number, f"non-integer index '{idx_text}'")
        if idx <= 0:
            raise DatasetParseError(line_number, f"index must be >= 1, got {idx}")
        if idx in seen:
            raise DatasetParseError(line_number, f"duplicate index {idx}")
        seen.add(idx)
        pairs.append((idx - 1, _parse_number(value_text, line_number, "value")))

    return raw_label, SparseVector.from_pairs(pairs)


def _label_map(raw_labels: Iterable[float]) -> dict[float, float]:
    """Map raw labels onto {-1, +1}: the larger of two values becomes +1.

    A file with a single distinct label keeps its sign (positive -> +1).
    """
    distinct = sorted(set(raw_labels))
    if len(distinct) > 2:
        shown = ", ".join(f"{v:g}" for v in distinct[:5])
        raise DatasetFormatError(
            f"expected at most two distinct labels, found {len(distinct)} ({shown})"
        )
    if len(distinct) == 1:
        return {distinct[0]: 1.0 if distinct[0] > 0 else -1.0}
    return {distinct[0]: -1.0, distinct[1]: 1.0}


def parse_dataset(source: str | Iterable[str]) -> SparseDataset:
    """Parse a dataset from text or an iterable of lines (e.g. an open file).

    Blank lines and ``#`` comment lines are skipped; indices within a line may
    appear in any order; zero values are dropped.

    Raises:
        DatasetParseError: If a line is malformed
        DatasetFormatError: If the input is empty or has more than two labels
    """
    lines = source.splitlines() if isinstance(source, str) else source

    raw_labels: list[float] = []
    examples: list[SparseVector] = []
    for line_number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        raw_label, vector = _parse_line(line, line_number)
        raw_labels.append(raw_label)
        examples.append(vector)

    if not examples:
        raise DatasetFormatError("dataset is empty")

    mapping = _label_map(raw_labels)
    labels = np.array([mapping[raw] for raw in raw_labels])
    dataset = SparseDataset.from_vectors(examples, labels)
    logger.info(
        f"Parsed {dataset.n} examples, d={dataset.d}, "
        f"{dataset.positive_fraction:.1%} positive"
    )
    return dataset


def format_vector(vector: SparseVector) -> str:
    """Render features as ``idx:val`` tokens with 1-based indices."""
    return " ".join(
        f"{i + 1}:{v!r}" for i, v in zip(vector.indices.tolist(), vector.values.tolist())
    )


def serialize_dataset(ds: SparseDataset) -> str:
    """Render a dataset in the sparse text format, labels as +1/-1."""
    lines = []
    for label, vector in zip(ds.labels.tolist(), ds.examples):
        features = format_vector(vector)
        prefix = "+1" if label > 0 else "-1"
        lines.append(f"{prefix} {features}" if features else prefix)
    return "".join(line + "\n" for line in lines)


def load_dataset(path: str | Path) -> SparseDataset:
    """Read a dataset file (UTF-8)."""
    path = Path(path)
    logger.info(f"Loading dataset from {path}")
    with open(path, encoding="utf-8") as f:
        return parse_dataset(f)


def write_dataset(ds: SparseDataset, path: str | Path) -> None:
    """Write a dataset file (UTF-8, ``\\n`` line endings)."""
    Path(path).write_text(serialize_dataset(ds), encoding="utf-8", newline="\n")
