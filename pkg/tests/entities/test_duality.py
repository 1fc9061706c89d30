"""
Unit tests for the space-time dual entities.
"""
import numpy as np
import pytest
from scipy.sparse.linalg import aslinearoperator

from src.entities.duality import (
    DualGate, FixedPointPair, ReplicaPermutation, TransferMatrix, column_dim,
)


def test_column_dim():
    """Test the dimension of one column copy."""
    assert column_dim(1, 2) == 8
    assert column_dim(2, 2, chi=2) == 64


class TestReplicaPermutation:
    """Tests for the ReplicaPermutation entity."""

    def test_single_pair(self):
        """Test the sheet pairings for n = 1."""
        perms = ReplicaPermutation(1)

        assert perms.m == 2
        assert perms.sheets == 4
        assert perms.pi1 == (2, 1, 0, 3)
        assert perms.pi2 == (0, 3, 2, 1)
        assert ReplicaPermutation.one_based(perms.pi1) == [3, 2, 1, 4]

    def test_cycles_for_two_pairs(self):
        """Test that pi1 cycles ket sheets and pi2 cycles bra sheets."""
        perms = ReplicaPermutation(2)

        assert perms.pi1 == (6, 1, 0, 3, 2, 5, 4, 7)
        assert perms.pi2 == (0, 7, 2, 1, 4, 3, 6, 5)

    def test_inverse_and_compose(self):
        """Test that sigma composed with its inverse is the identity."""
        perms = ReplicaPermutation(2)
        inverse = perms.inverse(perms.pi1)

        assert perms.compose(perms.pi1, inverse) == tuple(range(8))
        assert perms.compose(inverse, perms.pi1) == tuple(range(8))

    def test_matrix_matches_apply(self):
        """Test the dense permutation matrix against axis transposition."""
        perms = ReplicaPermutation(1)
        rng = np.random.default_rng(0)
        vector = rng.standard_normal((2,) * 4)

        dense = perms.matrix(perms.pi1, 2) @ vector.reshape(-1)

        assert np.allclose(dense, perms.apply(vector, perms.pi1).reshape(-1))

    def test_invalid_n(self):
        """Test that n must be positive."""
        with pytest.raises(ValueError):
            ReplicaPermutation(0)


class TestDualGate:
    """Tests for the DualGate entity."""

    def test_swap_permutation(self):
        """Test a dual gate built from a permutation tensor."""
        swap = np.eye(4)[[0, 2, 1, 3]].reshape(2, 2, 2, 2)
        gate = DualGate(tensor=swap)

        assert gate.d == 2
        assert gate.matrix.shape == (4, 4)
        assert gate.is_unitary()

    def test_shape(self):
        """Test that the four legs must be equal."""
        with pytest.raises(ValueError):
            DualGate(tensor=np.ones((2, 2, 2, 3)))


class TestTransferMatrix:
    """Tests for the TransferMatrix entity."""

    def test_dimension_check(self):
        """Test that the operator must match (chi d^(2t+1))^2."""
        operator = aslinearoperator(np.eye(64, dtype=np.complex128))
        transfer = TransferMatrix(t=1, d=2, chi=1, operator=operator, provenance={"cell": 3})

        assert transfer.dim == 64
        assert transfer.column_dim == 8
        assert transfer.cell == 3
        assert np.allclose(transfer.matvec(np.ones(64)), np.ones(64))

        with pytest.raises(ValueError):
            TransferMatrix(t=1, d=2, chi=2, operator=operator)
        with pytest.raises(ValueError):
            TransferMatrix(t=0, d=2, chi=1, operator=aslinearoperator(np.eye(4)))


class TestFixedPointPair:
    """Tests for the FixedPointPair entity."""

    @pytest.fixture
    def pair(self):
        rng = np.random.default_rng(4)
        r = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        l = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        l = l / np.conj(np.vdot(l, r))
        return FixedPointPair(l=l, r=r, t=1, d=2, x=2)

    def test_operator_forms(self, pair):
        """Test the matrix views and the overlap."""
        assert pair.M_l.shape == (8, 8)
        assert pair.overlap == pytest.approx(1.0)
        assert np.trace(pair.X) == pytest.approx(1.0)

    def test_rescaled_keeps_overlap(self, pair):
        """Test the gauge transformation."""
        rescaled = pair.rescaled(2.0 - 1.0j)

        assert rescaled.overlap == pytest.approx(1.0)
        assert np.allclose(rescaled.r, pair.r * (2.0 - 1.0j))

    def test_dict_form(self, pair):
        """Test the snapshot payload."""
        payload = pair.to_dict()
        restored = FixedPointPair.from_dict(payload)

        assert payload["shape"] == [8, 8]
        assert restored.x == 2
        assert np.allclose(restored.X, pair.X, atol=1e-12)

    def test_wrong_length(self):
        """Test that vectors must live in H_t (x) H_t."""
        with pytest.raises(ValueError):
            FixedPointPair(l=np.ones(10), r=np.ones(64), t=1, d=2)
