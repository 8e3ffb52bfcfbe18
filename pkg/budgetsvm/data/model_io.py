"""Text persistence for budgeted models.

Format::

    budgetsvm-model kernel=gaussian gamma=0.5 scale=1 budget=500
    <beta> <idx>:<val> <idx>:<val> ...
    ...

Floats are written with 17 significant digits so a load reproduces the
model exactly.
"""

import logging
from pathlib import Path

from budgetsvm.data.parser import format_vector
from budgetsvm.models import BudgetModel, KernelKind, KernelSpec, ModelEntry, SparseVector

logger = logging.getLogger(__name__)

MAGIC = "budgetsvm-model"


class ModelFormatError(Exception):
    """Model file could not be read."""

    pass


def _fmt(value: float) -> str:
    return format(value, ".17g")


def dump_model(model: BudgetModel) -> str:
    """Render a model in the text format."""
    header = [MAGIC, f"kernel={model.spec.kind.value}"]
    if model.spec.kind is KernelKind.GAUSSIAN:
        header.append(f"gamma={_fmt(model.spec.gamma)}")
    header.append(f"scale={_fmt(model.scale)}")
    header.append(f"budget={model.capacity if model.capacity is not None else 'none'}")
    lines = [" ".join(header)]
    for entry in model.entries:
        features = format_vector(entry.point)
        lines.append(f"{_fmt(entry.beta)} {features}".rstrip())
    return "\n".join(lines) + "\n"


def _parse_header(line: str) -> tuple[KernelSpec, float, int | None]:
    tokens = line.split()
    if not tokens or tokens[0] != MAGIC:
        raise ModelFormatError(f"missing '{MAGIC}' header")
    fields = dict(token.split("=", 1) for token in tokens[1:] if "=" in token)
    try:
        kind = KernelKind.from_name(fields["kernel"])
        gamma = float(fields.get("gamma", "1"))
        scale = float(fields["scale"])
        budget = None if fields.get("budget", "none") == "none" else int(fields["budget"])
        spec = KernelSpec(kind, gamma)
    except (KeyError, ValueError) as e:
        raise ModelFormatError(f"invalid header: {e}")
    return spec, scale, budget


def parse_model(text: str) -> BudgetModel:
    """Read a model from its text form."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ModelFormatError("model file is empty")
    spec, scale, budget = _parse_header(lines[0])
    model = BudgetModel(spec, budget)
    model.scale = scale
    for line_number, line in enumerate(lines[1:], start=2):
        beta_text, _, rest = line.strip().partition(" ")
        try:
            beta = float(beta_text)
            pairs = []
            for token in rest.split():
                idx, _, value = token.partition(":")
                pairs.append((int(idx) - 1, float(value)))
            point = SparseVector.from_pairs(pairs)
        except ValueError as e:
            raise ModelFormatError(f"line {line_number}: {e}")
        # Stored betas are raw, so bypass add_entry's scale division
        model.entries.append(ModelEntry(beta, point, pristine=False))
    return model


def save_model(model: BudgetModel, path: str | Path) -> None:
    """Write a model file."""
    Path(path).write_text(dump_model(model), encoding="utf-8", newline="\n")
    logger.info(f"Saved model with {len(model)} entries to {path}")


def load_model(path: str | Path) -> BudgetModel:
    """Read a model file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ModelFormatError(f"cannot read {path}: {e}")
    return parse_model(text)
