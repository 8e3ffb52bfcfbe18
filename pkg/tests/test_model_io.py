"""Tests for model persistence."""

import numpy as np
import pytest

from budgetsvm.data import ModelFormatError, load_model, save_model
from budgetsvm.data.model_io import dump_model, parse_model
from budgetsvm.models import BudgetModel, KernelKind, KernelSpec, SparseVector


@pytest.fixture
def model():
    m = BudgetModel(KernelSpec.gaussian(0.125), capacity=10)
    m.add_entry(0.1, SparseVector.from_pairs([(0, 1.0), (4, -2.5)]))
    m.add_entry(-1.0 / 3.0, SparseVector.from_pairs([(2, 0.3)]))
    m.scale_by(0.7)
    return m


class TestModelFiles:
    """Tests for save_model and load_model."""

    def test_header(self, model):
        """Test the header line."""
        first = dump_model(model).splitlines()[0]
        assert first.startswith("budgetsvm-model kernel=gaussian gamma=0.125 scale=0.69999999999999996")
        assert first.endswith("budget=10")

    def test_reload_predicts_identically(self, model, tmp_path):
        """Test a saved model gives the same margins after loading."""
        path = tmp_path / "run.model"
        save_model(model, path)
        loaded = load_model(path)
        queries = [SparseVector.from_pairs([(0, 0.5)]), SparseVector.from_pairs([(2, 1.0), (4, 1.0)])]
        for x in queries:
            assert loaded.predict_margin(x) == model.predict_margin(x)
        assert loaded.capacity == 10
        assert loaded.spec == model.spec

    def test_unbounded_linear(self, tmp_path):
        """Test a linear model without a budget."""
        m = BudgetModel(KernelSpec.linear())
        m.add_entry(2.0, SparseVector.from_pairs([(1, 1.0)]))
        loaded = parse_model(dump_model(m))
        assert loaded.capacity is None
        assert loaded.spec.kind is KernelKind.LINEAR
        np.testing.assert_array_equal(loaded.betas(), m.betas())

    def test_missing_header(self):
        """Test a file without the magic header."""
        with pytest.raises(ModelFormatError):
            parse_model("0.5 1:1\n")

    def test_bad_line(self):
        """Test a malformed entry line reports its line number."""
        with pytest.raises(ModelFormatError) as exc_info:
            parse_model("budgetsvm-model kernel=gaussian gamma=1 scale=1 budget=none\n0.5 1:x\n")
        assert "line 2" in str(exc_info.value)

    def test_empty(self):
        """Test an empty file."""
        with pytest.raises(ModelFormatError):
            parse_model("")

    def test_missing_file(self, tmp_path):
        """Test a missing file raises ModelFormatError."""
        with pytest.raises(ModelFormatError):
            load_model(tmp_path / "missing.model")
