"""Dataset and model file I/O."""

from budgetsvm.data.parser import (
    DatasetFormatError,
    DatasetParseError,
    load_dataset,
    parse_dataset,
    serialize_dataset,
    write_dataset,
)
from budgetsvm.data.model_io import ModelFormatError, load_model, save_model

__all__ = [
    "DatasetFormatError",
    "DatasetParseError",
    "load_dataset",
    "parse_dataset",
    "serialize_dataset",
    "write_dataset",
    "ModelFormatError",
    "load_model",
    "save_model",
]
