"""
Abstract interface for the space-time duality pipeline.
"""
from abc import ABC, abstractmethod
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.entities.density_matrix import Partition
from src.entities.duality import DualGate, FixedPointPair, MpsTransfer, TransferMatrix


class DualityService(ABC):
    """Interface for dual gates, column transfer matrices and fixed-point formulas."""

    @abstractmethod
    def dual_gate(self, gate: np.ndarray) -> DualGate:
        """
        Reshuffle a two-site unitary into its space-time dual.

        Raises:
            ValueError: If the gate is not unitary
        """
        pass

    @abstractmethod
    def build_transfer(
        self, t: int, odd_gates: Sequence[np.ndarray], even_gates: Sequence[np.ndarray],
        W: np.ndarray, d: int, chi: int = 1, cell: int = 0,
    ) -> TransferMatrix:
        """
        Build the transfer matrix of one cell.

        Args:
            t: Number of time steps
            odd_gates: Odd-layer gates of the cell, one per step
            even_gates: Even-layer gates straddling the right cell boundary
            W: Initial-state tensor of the cell, shape (chi, chi, d, d)
            d: Local dimension
            chi: MPS bond dimension (1 for product states)
            cell: Cell index recorded as provenance

        Raises:
            ValueError: On dimension mismatches
        """
        pass

    @abstractmethod
    def fixed_points(
        self, transfers: Sequence[TransferMatrix], x: int, method: str = "matrix_power",
    ) -> FixedPointPair:
        """
        Fixed points at column x of a ring of cell transfer matrices.

        Args:
            transfers: One transfer matrix per cell, ordered along the ring
            x: Column (cell boundary) index
            method: "matrix_power" or "power"

        Raises:
            FactorizationError: If the 2t-fold product is not rank one
        """
        pass

    @abstractmethod
    def fixed_point_operators(self, pair: FixedPointPair) -> Tuple[np.ndarray, np.ndarray]:
        """Return (M_l, M_r)."""
        pass

    @abstractmethod
    def dual_negativity(self, M_l: np.ndarray, M_r: np.ndarray) -> float:
        """``2 ln tr[(M_l^dagger M_r)^(1/2)]``."""
        pass

    @abstractmethod
    def dual_renyi(self, M_l: np.ndarray, M_r: np.ndarray, n: float) -> float:
        """``2/(1-n) ln tr[(M_l^dagger M_r)^n]``."""
        pass

    @abstractmethod
    def dual_moments(self, M_l: np.ndarray, M_r: np.ndarray, n: int) -> Dict[str, float]:
        """Even moment E_2n from the closed form and from the replica elements."""
        pass

    @abstractmethod
    def replica_identity_check(self, pair: FixedPointPair, n: int) -> List[float]:
        """Absolute residuals of the three replica identities."""
        pass

    @abstractmethod
    def factorization_check(
        self, transfers: Sequence[TransferMatrix], t: int, x: int = 0,
        length: Optional[int] = None, method: str = "matrix_power",
        gap: Optional[float] = None,
    ) -> Tuple[float, Optional[float]]:
        """
        Frobenius distance of the transfer product from the outer product of
        the extracted fixed points, and the MPS prediction
        ``gap ** (length - 2t - 1)`` when ``gap`` is given.
        """
        pass

    @abstractmethod
    def mps_transfer(self, W: np.ndarray) -> MpsTransfer:
        """MPS transfer matrix with unit leading eigenvalue and its gap."""
        pass

    @abstractmethod
    def replica_trace(self, transfers: Sequence[TransferMatrix], partition: Partition,
                      n: int) -> float:
        """Exact E_2n from the permuted replica ring."""
        pass

    @abstractmethod
    def dual_subsystem_entropies(
        self, pairs: Mapping[str, FixedPointPair], n: float
    ) -> Tuple[float, float, float]:
        """Interface-resolved (S_A, S_B, S_AB)."""
        pass

    @abstractmethod
    def dual_ratio(self, pair: FixedPointPair, alpha: float) -> float:
        """``R_alpha = 2 ln tr[X_AB^(alpha/2)]``."""
        pass
