"""Tests for the tuple encoding of secrets and observables."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from engines import encode
from engines.encoding import cantor_pair, zigzag


@pytest.mark.unit
class TestEncode:
    """Test encoding of variable tuples."""

    def test_empty_and_single(self):
        """Test no variables give 0 and one variable keeps its raw value."""
        assert encode(()) == 0
        assert encode((5,)) == 5
        assert encode((-3,)) == -3

    def test_zigzag(self):
        """Test integers interleave onto the naturals."""
        assert [zigzag(v) for v in (0, -1, 1, -2, 2)] == [0, 1, 2, 3, 4]

    def test_pairs(self):
        """Test the pairing walks the diagonals."""
        assert cantor_pair(0, 0) == 0
        assert cantor_pair(1, 0) == 1
        assert cantor_pair(0, 1) == 2
        assert encode((1, 0)) == 3

    @given(
        st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50)),
                 min_size=2, max_size=20, unique=True)
    )
    def test_injective_for_fixed_arity(self, tuples):
        """Test distinct tuples of the same arity get distinct codes."""
        codes = {encode(t) for t in tuples}
        assert len(codes) == len(tuples)
