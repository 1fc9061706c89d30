"""
Abstract interface for the GF(2) stabilizer engine.
"""
from abc import ABC, abstractmethod
from typing import Iterable

from src.entities.circuit import GateAssignment, PureState
from src.entities.density_matrix import Partition
from src.entities.stabilizer import CliffordDecomposition, StabilizerTableau


class StabilizerService(ABC):
    """Interface for Clifford brick-work evolution on stabilizer tableaux."""

    @abstractmethod
    def clifford_evolve(self, tableau: StabilizerTableau, gates: GateAssignment,
                        steps: int) -> StabilizerTableau:
        """
        Conjugate the tableau through ``steps`` brick-work steps.

        Args:
            tableau: Stabilizer tableau of the initial state
            gates: Assignment whose identifiers resolve to Clifford words
            steps: Number of time steps

        Raises:
            ValueError: If a gate is not a known Clifford word
        """
        pass

    @abstractmethod
    def stabilizer_entropy(self, tableau: StabilizerTableau, region: Iterable[int]) -> int:
        """Entanglement entropy of a region in units of ln 2."""
        pass

    @abstractmethod
    def ghz_bell_counts(self, tableau: StabilizerTableau, partition: Partition,
                        state: PureState) -> CliffordDecomposition:
        """
        Bell-pair and GHZ counts of a stabilizer state.

        Raises:
            DecompositionError: If a count is not integral within tolerance
        """
        pass
