"""
Abstract interface for the brute-force entanglement oracle.
"""
from abc import ABC, abstractmethod
from typing import Iterable

from src.entities.circuit import PureState
from src.entities.density_matrix import DensityMatrix, NegativitySpectrum, Partition
from src.entities.tensor import ComplexTensor


class EntanglementService(ABC):
    """Interface for entanglement measures computed from dense reduced states."""

    @abstractmethod
    def reduce(self, state: PureState, keep: Iterable[int]) -> DensityMatrix:
        """
        Trace out every site not in ``keep``.

        Args:
            state: Global pure state
            keep: Site indices to retain

        Returns:
            Reduced density matrix over the sorted retained sites

        Raises:
            SizeGuardError: If too many sites are retained
        """
        pass

    @abstractmethod
    def partial_transpose(self, rho: DensityMatrix, A: Iterable[int]) -> ComplexTensor:
        """
        Transpose the indices of the sites in A.

        Raises:
            ValueError: If A is not a subset of the retained sites
        """
        pass

    @abstractmethod
    def negativity_spectrum(self, rho: DensityMatrix, A: Iterable[int]) -> NegativitySpectrum:
        """Eigenvalues of the partial transpose, descending."""
        pass

    @abstractmethod
    def log_negativity(self, rho: DensityMatrix, A: Iterable[int]) -> float:
        """Logarithmic negativity ``ln sum |lambda_i|``."""
        pass

    @abstractmethod
    def negativity_moments(self, rho: DensityMatrix, A: Iterable[int], n: int) -> float:
        """Even moment ``ln sum lambda_i^(2n)``."""
        pass

    @abstractmethod
    def negativity_alpha(self, rho: DensityMatrix, A: Iterable[int], alpha: float) -> float:
        """
        Even-branch continuation ``ln sum |lambda_i|^alpha``.

        Raises:
            ValueError: If alpha <= 0
        """
        pass

    @abstractmethod
    def renyi_entropy(self, rho: DensityMatrix, alpha: float) -> float:
        """Renyi entropy of order alpha; alpha = 1 gives the von Neumann entropy."""
        pass

    @abstractmethod
    def mutual_information(self, state: PureState, partition: Partition, alpha: float) -> float:
        """Renyi mutual information between A and B of a pure global state."""
        pass

    @abstractmethod
    def ratio_R(self, rho: DensityMatrix, A: Iterable[int], alpha: float) -> float:
        """``ln(sum |lambda_i(rho^tA)|^alpha / sum mu_i(rho)^alpha)``."""
        pass
