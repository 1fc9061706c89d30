"""
Numpy/scipy implementation of the dense linear-algebra substrate.
"""
import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import LinearOperator

from src.entities.exceptions import ConvergenceError, SizeGuardError, SpectrumError
from src.entities.tensor import ComplexTensor, noise_floor
from src.interfaces.services.linear_algebra_service import LinearAlgebraService

logger = logging.getLogger(__name__)


def as_array(matrix) -> np.ndarray:
    """Accept a ComplexTensor or anything numpy can read."""
    if isinstance(matrix, ComplexTensor):
        return matrix.array
    return np.asarray(matrix, dtype=np.complex128)


def apply_on_axes(vector: np.ndarray, op: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """
    Contract an operator tensor ``op[out_1..out_k, in_1..in_k]`` with the
    given axes of ``vector`` and put the outputs back in place.
    """
    k = len(axes)
    moved = np.tensordot(op, vector, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(moved, list(range(k)), list(axes))


def make_operator(
    dim: int,
    apply_batch: Callable[[np.ndarray], np.ndarray],
    apply_adjoint_batch: Callable[[np.ndarray], np.ndarray],
) -> LinearOperator:
    """
    Wrap batch actions (rows of a ``(B, dim)`` array) as a scipy operator.
    """
    def matvec(v):
        return apply_batch(np.asarray(v).reshape(1, dim))[0]

    def rmatvec(v):
        return apply_adjoint_batch(np.asarray(v).reshape(1, dim))[0]

    def matmat(m):
        return apply_batch(np.asarray(m).T).T

    def rmatmat(m):
        return apply_adjoint_batch(np.asarray(m).T).T

    return LinearOperator(
        shape=(dim, dim), matvec=matvec, rmatvec=rmatvec, matmat=matmat,
        rmatmat=rmatmat, dtype=np.complex128,
    )


def compose(operators: Sequence[LinearOperator]) -> LinearOperator:
    """Product applying ``operators[0]`` first."""
    if not operators:
        raise ValueError("Cannot compose an empty operator list")
    dim = operators[0].shape[0]

    def forward(batch):
        out = batch.T
        for op in operators:
            out = op.matmat(out)
        return out.T

    def backward(batch):
        out = batch.T
        for op in reversed(operators):
            out = op.rmatmat(out)
        return out.T

    return make_operator(dim, forward, backward)


def dense_matrix(operator: LinearOperator, limit: int) -> np.ndarray:
    """Materialize an operator, refusing beyond ``limit`` rows."""
    dim = operator.shape[0]
    if dim > limit:
        raise SizeGuardError(f"Dense operator of dimension {dim} exceeds limit {limit}")
    return operator.matmat(np.eye(dim, dtype=np.complex128))


def is_linear(operator: LinearOperator, seed: int = 0, tol: float = 1e-10) -> bool:
    """Probe ``M(a u + b v) = a M u + b M v`` on random vectors."""
    rng = np.random.default_rng(seed)
    dim = operator.shape[1]
    u = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    a, b = 0.7 - 0.2j, -1.3 + 0.5j
    lhs = operator.matvec(a * u + b * v)
    rhs = a * operator.matvec(u) + b * operator.matvec(v)
    scale = max(1.0, float(np.linalg.norm(rhs)))
    return float(np.linalg.norm(lhs - rhs)) <= tol * scale


def eigenpair_residual(operator: LinearOperator, mu: complex, r: np.ndarray,
                       l: np.ndarray) -> float:
    """``max(|T r - mu r| / |r|, |T^dagger l - conj(mu) l| / |l|)``."""
    right = np.linalg.norm(operator.matvec(r) - mu * r) / np.linalg.norm(r)
    left = np.linalg.norm(operator.rmatvec(l) - np.conj(mu) * l) / np.linalg.norm(l)
    return float(max(right, left))


class NumpyTensorCore(LinearAlgebraService):
    """Dense numerics on numpy arrays with scipy decompositions."""

    def __init__(
        self,
        hermitian_tol: float = 1e-8,
        clip_relative: float = 1e-10,
        power_tol: float = 1e-11,
        power_max_iter: int = 2000,
        dense_limit: int = 4096,
        noise_factor: float = 10.0,
        gap_tol: float = 1e-6,
        gap_iter: int = 100,
    ):
        """
        Initialize the tensor core.

        Args:
            hermitian_tol: Allowed anti-Hermitian part before symmetrization
            clip_relative: Negative-eigenvalue clip relative to the largest |lambda|
            power_tol: Residual tolerance of the power method
            power_max_iter: Iteration cap of the power method
            dense_limit: Largest dimension for dense eigensolver fallbacks
            noise_factor: Multiplier of the eps * dim * max|lambda| noise floor
            gap_tol: Smallest accepted relative gap 1 - |lambda_2 / lambda_1|
            gap_iter: Iterations of the deflated power method estimating |lambda_2|
        """
        self.hermitian_tol = hermitian_tol
        self.clip_relative = clip_relative
        self.power_tol = power_tol
        self.power_max_iter = power_max_iter
        self.dense_limit = dense_limit
        self.noise_factor = noise_factor
        self.gap_tol = gap_tol
        self.gap_iter = gap_iter

    def haar_unitary(self, dim: int, seed: int) -> ComplexTensor:
        if dim < 1:
            raise ValueError(f"Unitary dimension must be positive, got {dim}")
        rng = np.random.default_rng(seed)
        ginibre = (rng.standard_normal((dim, dim))
                   + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
        q, r = linalg.qr(ginibre)
        diagonal = np.diag(r)
        phases = diagonal / np.abs(diagonal)
        return ComplexTensor.from_array(q * phases)

    def hermitian_eigs(
        self, matrix, tol: Optional[float] = None
    ) -> Tuple[np.ndarray, ComplexTensor]:
        m = as_array(matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"Expected a square matrix, got shape {m.shape}")
        tol = self.hermitian_tol if tol is None else tol
        defect = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if defect > tol:
            raise SpectrumError(f"Matrix is not Hermitian: max|M - M^dagger| = {defect:.3e}")
        values, vectors = linalg.eigh((m + m.conj().T) / 2)
        return values[::-1].copy(), ComplexTensor.from_array(vectors[:, ::-1])

    def frac_power_trace(self, matrix, alpha: float, clip: Optional[float] = None) -> float:
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        m = as_array(matrix)
        anti = float(np.linalg.norm(m - m.conj().T)) / 2
        scale = max(1.0, float(np.linalg.norm(m)))
        logger.debug(f"frac_power_trace: anti-Hermitian norm {anti:.3e}")
        if anti > self.hermitian_tol * scale:
            raise SpectrumError(f"Anti-Hermitian part {anti:.3e} exceeds tolerance")
        values = linalg.eigvalsh((m + m.conj().T) / 2)
        clip = self.clip_relative if clip is None else clip
        threshold = clip * max(float(np.max(np.abs(values))), 0.0) if values.size else 0.0
        if values.size and values.min() < -threshold:
            raise SpectrumError(
                f"Eigenvalue {values.min():.3e} below clipping threshold {-threshold:.3e}"
            )
        kept = values[values > noise_floor(values, self.noise_factor)]
        return float(np.sum(kept ** alpha))

    def _power(self, apply: Callable[[np.ndarray], np.ndarray], dim: int,
               tol: float, max_iter: int, seed: int) -> Tuple[complex, np.ndarray, int]:
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        x /= np.linalg.norm(x)
        mu = 0j
        for iteration in range(1, max_iter + 1):
            y = apply(x)
            y_norm = np.linalg.norm(y)
            if y_norm == 0:
                raise ConvergenceError("Power iteration hit the null space")
            mu = np.vdot(x, y)
            residual = np.linalg.norm(y - mu * x)
            if residual <= tol:
                return complex(mu), x, iteration
            x = y / y_norm
        raise ConvergenceError(
            f"Power iteration did not converge in {max_iter} steps (no spectral gap?)"
        )

    def leading_pair(
        self, operator: LinearOperator, tol: Optional[float] = None,
        max_iter: Optional[int] = None,
    ) -> Tuple[complex, np.ndarray, np.ndarray]:
        tol = self.power_tol if tol is None else tol
        max_iter = self.power_max_iter if max_iter is None else max_iter
        dim = operator.shape[0]
        try:
            mu, r, steps_r = self._power(operator.matvec, dim, tol, max_iter, seed=1)
            mu_left, l, steps_l = self._power(operator.rmatvec, dim, tol, max_iter, seed=2)
            logger.debug(f"leading_pair: converged after {steps_r}/{steps_l} iterations")
            if abs(mu_left - np.conj(mu)) > 10 * tol * max(1.0, abs(mu)):
                raise ConvergenceError(
                    f"Right ({mu:.6g}) and left ({mu_left:.6g}) eigenvalues disagree"
                )
            l = self._biorthogonal(l, r)
            self._check_gap(operator, mu, r, l)
        except ConvergenceError as error:
            if dim > self.dense_limit:
                raise
            logger.warning(f"Falling back to dense eigensolver: {error}")
            mu, r, l = self._dense_leading_pair(dense_matrix(operator, self.dense_limit))
            l = self._biorthogonal(l, r)
        residual = eigenpair_residual(operator, mu, r, l)
        if residual > 100 * tol:
            raise ConvergenceError(
                f"Leading pair residual {residual:.3e} exceeds tolerance {tol:.1e}"
            )
        return complex(mu), r, l

    @staticmethod
    def _biorthogonal(l: np.ndarray, r: np.ndarray) -> np.ndarray:
        overlap = np.vdot(l, r)
        if abs(overlap) < 1e-14:
            raise ConvergenceError("Left and right eigenvectors are orthogonal")
        return l / np.conj(overlap)

    def _check_gap(self, operator: LinearOperator, mu: complex, r: np.ndarray,
                   l: np.ndarray) -> None:
        """Estimate |lambda_2| by power iteration on ``T - mu |r><l|``."""
        rng = np.random.default_rng(3)
        x = rng.standard_normal(len(r)) + 1j * rng.standard_normal(len(r))
        x /= np.linalg.norm(x)
        ratio = 0.0
        for _ in range(self.gap_iter):
            y = operator.matvec(x) - mu * r * np.vdot(l, x)
            y_norm = float(np.linalg.norm(y))
            if y_norm <= 1e-14 * abs(mu):
                return
            ratio = y_norm
            x = y / y_norm
        if ratio > (1.0 - self.gap_tol) * abs(mu):
            raise ConvergenceError(
                f"No spectral gap: |lambda_2| ~ {ratio:.12g} against |lambda_1| = {abs(mu):.12g}"
            )

    @staticmethod
    def _dense_leading_pair(matrix: np.ndarray) -> Tuple[complex, np.ndarray, np.ndarray]:
        values, right = np.linalg.eig(matrix)
        order = np.argsort(-np.abs(values))
        if len(values) > 1 and abs(abs(values[order[0]]) - abs(values[order[1]])) < 1e-10:
            raise ConvergenceError("Leading eigenvalue is degenerate")
        mu = values[order[0]]
        values_left, left = np.linalg.eig(matrix.conj().T)
        index = int(np.argmin(np.abs(values_left - np.conj(mu))))
        return complex(mu), right[:, order[0]], left[:, index]
