"""Tests for the sparse text format."""

import pytest

from budgetsvm.data import (
    DatasetFormatError,
    DatasetParseError,
    load_dataset,
    parse_dataset,
    serialize_dataset,
    write_dataset,
)


class TestParseDataset:
    """Tests for parse_dataset function."""

    def test_parse_simple(self):
        """Test parsing two well-formed lines."""
        ds = parse_dataset("+1 1:0.5 3:2\n-1 2:1\n")
        assert ds.n == 2
        assert ds.d == 3
        assert ds.labels.tolist() == [1.0, -1.0]
        assert ds.examples[0].indices.tolist() == [0, 2]
        assert ds.examples[0].values.tolist() == [0.5, 2.0]

    def test_zero_one_labels(self):
        """Test that {0, 1} labels map 1 -> +1 and 0 -> -1."""
        ds = parse_dataset("0 1:1\n1 1:2\n0 2:1\n")
        assert ds.labels.tolist() == [-1.0, 1.0, -1.0]

    def test_one_two_labels(self):
        """Test that the larger of two labels becomes +1."""
        ds = parse_dataset("2 1:1\n1 1:2\n")
        assert ds.labels.tolist() == [1.0, -1.0]

    def test_single_label_keeps_sign(self):
        """Test that a one-class file maps by sign."""
        assert parse_dataset("-1 1:1\n-1 1:2\n").labels.tolist() == [-1.0, -1.0]
        assert parse_dataset("3 1:1\n").labels.tolist() == [1.0]

    def test_out_of_order_indices(self):
        """Test that unsorted indices are accepted and sorted."""
        ds = parse_dataset("+1 5:1 2:3\n")
        assert ds.examples[0].indices.tolist() == [1, 4]

    def test_blank_and_comment_lines(self):
        """Test that blank lines and comments are skipped."""
        ds = parse_dataset("# header\n\n+1 1:1\n   \n-1 1:2\n")
        assert ds.n == 2

    def test_label_only_line(self):
        """Test that a line without features is the zero vector."""
        ds = parse_dataset("+1\n-1 1:1\n")
        assert ds.examples[0].nnz == 0

    def test_zero_values_dropped(self):
        """Test that explicit zeros are not stored."""
        ds = parse_dataset("+1 1:0 2:1\n-1 1:1\n")
        assert ds.examples[0].indices.tolist() == [1]

    def test_duplicate_index(self):
        """Test that a duplicated index reports the line and index."""
        with pytest.raises(DatasetParseError) as exc_info:
            parse_dataset("+1 1:1\n-1 2:1 2:3\n")
        assert exc_info.value.line_number == 2
        assert "duplicate index 2" in str(exc_info.value)

    def test_zero_index(self):
        """Test that indices are 1-based."""
        with pytest.raises(DatasetParseError) as exc_info:
            parse_dataset("+1 0:1\n")
        assert "line 1" in str(exc_info.value)

    def test_non_numeric_value(self):
        """Test that a non-numeric feature value is rejected."""
        with pytest.raises(DatasetParseError) as exc_info:
            parse_dataset("+1 1:abc\n")
        assert "non-numeric" in str(exc_info.value)

    def test_missing_colon(self):
        """Test that a token without ':' is rejected."""
        with pytest.raises(DatasetParseError):
            parse_dataset("+1 1:1 7\n")

    def test_non_finite_value(self):
        """Test that nan and inf are rejected."""
        with pytest.raises(DatasetParseError):
            parse_dataset("+1 1:nan\n")
        with pytest.raises(DatasetParseError):
            parse_dataset("+1 1:inf\n")

    def test_three_labels(self):
        """Test that more than two distinct labels is a format error."""
        with pytest.raises(DatasetFormatError) as exc_info:
            parse_dataset("1 1:1\n2 1:1\n3 1:1\n")
        assert not isinstance(exc_info.value, DatasetParseError)
        assert "two distinct labels" in str(exc_info.value)

    def test_empty_input(self):
        """Test that an empty input is rejected."""
        with pytest.raises(DatasetFormatError):
            parse_dataset("# only a comment\n\n")

    def test_iterable_of_lines(self):
        """Test parsing from a list of lines."""
        ds = parse_dataset(["+1 1:1\n", "-1 2:1\n"])
        assert ds.n == 2


class TestSerializeDataset:
    """Tests for writing datasets."""

    def test_serialize_format(self):
        """Test the exact text produced."""
        ds = parse_dataset("1 3:2.5 1:1\n0 2:-1\n")
        assert serialize_dataset(ds) == "+1 1:1.0 3:2.5\n-1 2:-1.0\n"

    def test_file_round_trip(self, tmp_path):
        """Test that writing and loading gives the same dataset."""
        ds = parse_dataset("+1 1:0.1 4:0.30000000000000004\n-1 2:7\n")
        path = tmp_path / "data.txt"
        write_dataset(ds, path)
        assert load_dataset(path) == ds

    def test_load_missing_file(self, tmp_path):
        """Test that a missing file raises OSError."""
        with pytest.raises(OSError):
            load_dataset(tmp_path / "missing.txt")
