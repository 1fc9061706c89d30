"""
Unit tests for the stabilizer entities.
"""
import numpy as np
import pytest

from src.entities.stabilizer import CliffordDecomposition, StabilizerTableau, gf2_rank


def test_gf2_rank():
    """Test rank over GF(2), where 1 + 1 = 0."""
    assert gf2_rank(np.array([[1, 1], [1, 1]])) == 1
    assert gf2_rank(np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])) == 2
    assert gf2_rank(np.eye(4, dtype=np.uint8)) == 4
    assert gf2_rank(np.zeros((3, 3), dtype=np.uint8)) == 0


class TestStabilizerTableau:
    """Tests for the StabilizerTableau entity."""

    def test_zero_state(self):
        """Test the tableau of |0...0>."""
        tableau = StabilizerTableau.zero_state(3)

        assert tableau.n == 3
        assert tableau.is_valid()
        assert tableau.stabilizer_strings() == ["+ZII", "+IZI", "+IIZ"]

    def test_anticommuting_generators(self):
        """Test that X and Z on the same qubit are not a valid stabilizer set."""
        plus_zero = StabilizerTableau(
            x=np.array([[1, 0], [0, 1], [1, 0], [0, 0]]),
            z=np.array([[0, 0], [0, 0], [0, 0], [0, 1]]),
            r=np.zeros(4),
        )
        assert plus_zero.is_valid()
        assert plus_zero.stabilizer_strings() == ["+XI", "+IZ"]

        clash = StabilizerTableau(
            x=np.array([[1, 0], [0, 1], [1, 0], [0, 0]]),
            z=np.array([[0, 0], [0, 0], [0, 0], [1, 0]]),
            r=np.zeros(4),
        )
        assert not clash.is_valid()

    def test_signs(self):
        """Test the sign bit in the Pauli strings."""
        tableau = StabilizerTableau(
            x=np.array([[1], [0]]), z=np.array([[0], [1]]), r=np.array([0, 1])
        )

        assert tableau.stabilizer_strings() == ["-Z"]

    def test_shapes(self):
        """Test block shape validation."""
        with pytest.raises(ValueError):
            StabilizerTableau(x=np.zeros((3, 2)), z=np.zeros((3, 2)), r=np.zeros(3))
        with pytest.raises(ValueError):
            StabilizerTableau(x=np.zeros((4, 2)), z=np.zeros((4, 2)), r=np.zeros(3))
        with pytest.raises(ValueError):
            StabilizerTableau.zero_state(0)


class TestCliffordDecomposition:
    """Tests for the CliffordDecomposition entity."""

    def test_entropies(self):
        """Test the region entropies implied by the counts."""
        counts = CliffordDecomposition(e_AB=2, e_BC=1, e_CA=0, g_ABC=1)

        assert counts.s_A == 3
        assert counts.s_B == 4
        assert counts.s_C == 2
        assert counts.to_dict() == {"e_AB": 2, "e_BC": 1, "e_CA": 0, "g_ABC": 1}

    def test_negative_count(self):
        """Test that counts are non-negative integers."""
        with pytest.raises(ValueError):
            CliffordDecomposition(e_AB=-1, e_BC=0, e_CA=0, g_ABC=0)
        with pytest.raises(ValueError):
            CliffordDecomposition(e_AB=0.5, e_BC=0, e_CA=0, g_ABC=0)
