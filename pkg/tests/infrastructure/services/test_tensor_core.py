"""
Unit tests for the numpy tensor core.
"""
import numpy as np
import pytest
from scipy.sparse.linalg import aslinearoperator

from src.entities.exceptions import ConvergenceError, SizeGuardError, SpectrumError
from src.entities.tensor import EPS, ComplexTensor, noise_floor
from src.infrastructure.services.tensor_core import (
    NumpyTensorCore, apply_on_axes, compose, dense_matrix, eigenpair_residual, is_linear,
    make_operator,
)


@pytest.fixture
def core():
    return NumpyTensorCore()


class TestHelpers:
    """Tests for the module-level operator helpers."""

    def test_apply_on_axes(self):
        """Test a bit flip on the middle axis of a three-qubit tensor."""
        vector = np.zeros((2, 2, 2))
        vector[0, 0, 1] = 1.0
        flip = np.array([[0, 1], [1, 0]])

        out = apply_on_axes(vector, flip, [1])

        assert out[0, 1, 1] == 1.0
        assert np.sum(np.abs(out)) == 1.0

    def test_apply_two_axes(self):
        """Test a two-site operator on non-adjacent axes."""
        rng = np.random.default_rng(1)
        vector = rng.standard_normal((2, 3, 2))
        op = rng.standard_normal((2, 2, 2, 2))

        out = apply_on_axes(vector, op, [0, 2])
        expected = np.einsum("acbd,bxd->axc", op, vector)

        assert np.allclose(out, expected)

    def test_compose_order(self):
        """Test that the first operator is applied first."""
        rng = np.random.default_rng(2)
        a = rng.standard_normal((3, 3))
        b = rng.standard_normal((3, 3))

        product = compose([aslinearoperator(a), aslinearoperator(b)])

        assert np.allclose(dense_matrix(product, 10), b @ a)
        assert np.allclose(product.rmatvec(np.ones(3)), (b @ a).conj().T @ np.ones(3))

    def test_compose_empty(self):
        """Test that composing nothing is an error."""
        with pytest.raises(ValueError):
            compose([])

    def test_make_operator(self):
        """Test wrapping batch actions."""
        m = np.arange(4.0).reshape(2, 2)
        operator = make_operator(2, lambda batch: batch @ m.T, lambda batch: batch @ m.conj())

        assert np.allclose(operator.matvec(np.array([1.0, 0.0])), m[:, 0])
        assert np.allclose(operator.rmatvec(np.array([1.0, 0.0])), m[0, :])

    def test_dense_guard(self):
        """Test the materialization guard."""
        with pytest.raises(SizeGuardError):
            dense_matrix(aslinearoperator(np.eye(8)), 4)

    def test_is_linear(self):
        """Test the linearity probe."""
        rng = np.random.default_rng(3)
        assert is_linear(aslinearoperator(rng.standard_normal((5, 5))))

    def test_noise_floor(self):
        """Test that the eigenvalue floor scales with dimension and spectrum."""
        values = np.array([0.5, -0.25, 0.0, 0.0])

        assert noise_floor(values) == pytest.approx(4 * EPS * 0.5)
        assert noise_floor(2 * values, factor=3.0) == pytest.approx(3 * 4 * EPS * 1.0)
        assert noise_floor(np.array([])) == 0.0

    def test_eigenpair_residual(self):
        """Test the relative residual of an approximate eigenpair."""
        operator = aslinearoperator(np.diag([1.0, 0.5]))
        exact = eigenpair_residual(operator, 1.0, np.array([2.0, 0.0]), np.array([1.0, 0.0]))
        off = eigenpair_residual(operator, 1.0, np.array([1.0, 1e-3]), np.array([1.0, 0.0]))

        assert exact == 0.0
        assert off == pytest.approx(0.5e-3, rel=1e-3)


class TestNumpyTensorCore:
    """Tests for the NumpyTensorCore service."""

    def test_haar_unitary(self, core):
        """Test unitarity and seed reproducibility."""
        u = core.haar_unitary(4, seed=9).array

        assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
        assert np.array_equal(u, core.haar_unitary(4, seed=9).array)
        assert not np.allclose(u, core.haar_unitary(4, seed=10).array)

        with pytest.raises(ValueError):
            core.haar_unitary(0, seed=1)

    def test_hermitian_eigs(self, core):
        """Test descending eigenvalues and eigenvectors."""
        values, vectors = core.hermitian_eigs(np.diag([0.2, 0.7, 0.1]))

        assert np.allclose(values, [0.7, 0.2, 0.1])
        assert isinstance(vectors, ComplexTensor)
        assert abs(vectors.array[1, 0]) == pytest.approx(1.0)

    def test_hermitian_eigs_rejects(self, core):
        """Test that non-Hermitian input is refused."""
        with pytest.raises(SpectrumError):
            core.hermitian_eigs(np.array([[1.0, 1.0], [0.0, 1.0]]))
        with pytest.raises(ValueError):
            core.hermitian_eigs(np.ones((2, 3)))

    def test_frac_power_trace(self, core):
        """Test tr[M^alpha] on a diagonal matrix."""
        m = np.diag([0.25, 0.75])

        assert core.frac_power_trace(m, 0.5) == pytest.approx(0.5 + np.sqrt(0.75))
        assert core.frac_power_trace(m, 1.0) == pytest.approx(1.0)
        assert core.frac_power_trace(np.diag([1.0, 0.0]), 0.5) == pytest.approx(1.0)

    def test_frac_power_trace_rejects(self, core):
        """Test the alpha and clipping checks."""
        with pytest.raises(ValueError):
            core.frac_power_trace(np.eye(2), 0.0)
        with pytest.raises(SpectrumError):
            core.frac_power_trace(np.diag([1.0, -0.1]), 0.5)

    def test_frac_power_trace_clips_noise(self, core):
        """Test that round-off negatives below the clip are dropped."""
        value = core.frac_power_trace(np.diag([1.0, -1e-13]), 0.5)

        assert value == pytest.approx(1.0)

    def test_leading_pair(self, core):
        """Test the power method on a diagonalizable matrix with a gap."""
        rng = np.random.default_rng(5)
        basis = rng.standard_normal((4, 4))
        m = basis @ np.diag([1.0, 0.5, 0.2, -0.1]) @ np.linalg.inv(basis)

        mu, r, l = core.leading_pair(aslinearoperator(m))

        assert mu == pytest.approx(1.0, abs=1e-9)
        assert np.allclose(m @ r, r, atol=1e-8)
        assert np.vdot(l, r) == pytest.approx(1.0)

    def test_degenerate_leading_pair(self):
        """Test that a degenerate top eigenvalue is reported."""
        core = NumpyTensorCore(power_max_iter=50)
        m = np.diag([1.0, -1.0, 0.3])

        with pytest.raises(ConvergenceError):
            core.leading_pair(aslinearoperator(m))

    def test_frac_power_trace_rank_deficient(self, core):
        """Test that the rounding-noise eigenvalues of a rank-2 matrix add nothing."""
        v = core.haar_unitary(6, seed=11).array
        m = v @ np.diag([0.7, 0.3, 0.0, 0.0, 0.0, 0.0]) @ v.conj().T

        value = core.frac_power_trace(m, 0.5)

        assert value == pytest.approx(np.sqrt(0.7) + np.sqrt(0.3), abs=1e-12)

    def test_near_degenerate_falls_back(self, core):
        """Test that a tiny gap is resolved by the dense eigensolver."""
        m = np.diag([1.0, 1.0 - 1e-9, 0.5])

        mu, r, l = core.leading_pair(aslinearoperator(m))

        assert mu == pytest.approx(1.0, abs=1e-12)
        assert abs(r[1]) / abs(r[0]) < 1e-8
        assert np.vdot(l, r) == pytest.approx(1.0)

    def test_gapless_converged_vector_rejected(self, core):
        """Test that a mixed vector passing the residual test is not accepted."""
        m = np.diag([1.0, 1.0 - 1e-13, 0.5])

        with pytest.raises(ConvergenceError):
            core.leading_pair(aslinearoperator(m))

    def test_gap_check_passes_rank_one(self, core):
        """Test that a nilpotent remainder counts as a gap."""
        m = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 5.0], [0.0, 0.0, 0.0]])

        mu, r, l = core.leading_pair(aslinearoperator(m))

        assert mu == pytest.approx(1.0, abs=1e-9)
        assert eigenpair_residual(aslinearoperator(m), mu, r, l) < 1e-9
