"""Tests for CSV matrix and trace export."""

import csv
from fractions import Fraction

import numpy as np
import pytest

from distributions import JointDistribution, read_joint_csv, read_matrix_csv, write_matrix_csv, write_trace_csv
from exceptions import InvalidDistributionError


@pytest.mark.unit
class TestMatrixCsv:
    """Test the matrix CSV layout."""

    def test_header_and_values(self, tmp_path):
        """Test the corner label and value axes."""
        path = tmp_path / "joint.csv"
        j = JointDistribution.from_matrix([[0.25, 0.25], [0.5, 0.0]], secrets=[3, 7], observables=[0, 9])
        write_matrix_csv(j, str(path))

        rows = list(csv.reader(path.open()))
        assert rows[0] == ["x\\y", "0", "9"]
        assert rows[1][0] == "3"

        secrets, observables, matrix = read_matrix_csv(str(path))
        assert secrets == [3, 7]
        assert observables == [0, 9]
        assert np.array_equal(matrix, j.pxy)

    def test_read_joint(self, tmp_path):
        """Test reading a hand-written joint."""
        path = tmp_path / "hand.csv"
        path.write_text("x\\y,0,1\n0,0.5,0\n1,0,0.5\n")
        j = read_joint_csv(str(path))
        assert j.probability(1, 1) == 0.5

    def test_ragged_rejected(self, tmp_path):
        """Test ragged rows are rejected."""
        path = tmp_path / "ragged.csv"
        path.write_text("x\\y,0,1\n0,0.5\n")
        with pytest.raises(InvalidDistributionError):
            read_matrix_csv(str(path))

    def test_non_numeric_rejected(self, tmp_path):
        """Test text cells are rejected."""
        path = tmp_path / "text.csv"
        path.write_text("x\\y,0\n0,half\n")
        with pytest.raises(InvalidDistributionError, match="non-numeric"):
            read_matrix_csv(str(path))


@pytest.mark.unit
class TestTraceCsv:
    """Test the exact trace dump."""

    def test_fractions_written_exactly(self, tmp_path):
        """Test probabilities are written as fractions."""
        path = tmp_path / "traces.csv"
        count = write_trace_csv([(0, 1, Fraction(1, 3)), (1, 1, Fraction(2, 3))], str(path))
        assert count == 2
        rows = list(csv.reader(path.open()))
        assert rows == [["secret", "observable", "probability"], ["0", "1", "1/3"], ["1", "1", "2/3"]]
