"""
Abstract interface for the dense linear-algebra substrate.
"""
from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator

from src.entities.tensor import ComplexTensor


class LinearAlgebraService(ABC):
    """Interface for Haar sampling, Hermitian spectra and fixed-point solvers."""

    @abstractmethod
    def haar_unitary(self, dim: int, seed: int) -> ComplexTensor:
        """
        Sample a Haar-random unitary.

        Args:
            dim: Matrix dimension
            seed: Seed of the generator

        Returns:
            A dim x dim unitary, identical for identical seeds

        Raises:
            ValueError: If dim < 1
        """
        pass

    @abstractmethod
    def hermitian_eigs(
        self, matrix: np.ndarray, tol: Optional[float] = None
    ) -> Tuple[np.ndarray, ComplexTensor]:
        """
        Diagonalize a Hermitian matrix.

        Args:
            matrix: Square matrix, Hermitian to ``tol``
            tol: Allowed entrywise anti-Hermitian part

        Returns:
            Eigenvalues in descending order and the matching eigenvectors
            as columns

        Raises:
            SpectrumError: If the matrix is not Hermitian within tol
        """
        pass

    @abstractmethod
    def frac_power_trace(self, matrix: np.ndarray, alpha: float,
                         clip: Optional[float] = None) -> float:
        """
        Compute ``tr[M^alpha]`` for an effectively positive Hermitian matrix.

        Args:
            matrix: Square matrix, symmetrized before use
            alpha: Positive power
            clip: Relative clipping threshold for negative eigenvalues

        Returns:
            lambda^alpha summed over the eigenvalues above the noise floor

        Raises:
            SpectrumError: If an eigenvalue lies below the clipping threshold
        """
        pass

    @abstractmethod
    def leading_pair(
        self, operator: LinearOperator, tol: Optional[float] = None,
        max_iter: Optional[int] = None,
    ) -> Tuple[complex, np.ndarray, np.ndarray]:
        """
        Leading eigenvalue with right and left eigenvectors.

        Args:
            operator: Operator providing matvec and rmatvec
            tol: Residual tolerance for both eigenvectors
            max_iter: Iteration cap of the power method

        Returns:
            (mu, r, l) with ``<l|r> = 1``

        Raises:
            ConvergenceError: If no spectral gap is detected or the residual exceeds tol
        """
        pass
