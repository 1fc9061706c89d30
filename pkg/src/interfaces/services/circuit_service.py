"""
Abstract interface for brick-work circuit construction and evolution.
"""
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from src.entities.circuit import GateAssignment, InitialState, LatticeSpec, PureState
from src.entities.experiment import CircuitConfig


class CircuitService(ABC):
    """Interface for circuit construction and exact state-vector evolution."""

    @abstractmethod
    def make_gates(self, config: CircuitConfig, steps: Optional[int] = None) -> GateAssignment:
        """
        Draw the gate assignment of a circuit document.

        Args:
            config: Circuit document (family, seed, homogeneity)
            steps: Number of time steps to cover (defaults to t_max)

        Returns:
            Gate assignment reproducible from (family, seed)
        """
        pass

    @abstractmethod
    def make_initial_state(self, config: CircuitConfig) -> InitialState:
        """
        Build the initial-state variant described by a circuit document.

        Args:
            config: Circuit document

        Returns:
            Product or MPS initial state
        """
        pass

    @abstractmethod
    def build_state(self, lattice: LatticeSpec, init: InitialState) -> PureState:
        """
        Expand an initial state into a normalized state vector.

        Args:
            lattice: Lattice of 2L sites
            init: Product or MPS initial state

        Returns:
            Unit-norm state vector

        Raises:
            ValueError: If the MPS ring has zero norm
            SizeGuardError: If the chain is too long for a state vector
        """
        pass

    @abstractmethod
    def apply_two_site(self, state: PureState, gate: np.ndarray, x: float) -> PureState:
        """
        Apply a two-site gate with its right edge at site position x.

        Args:
            state: Input state
            gate: d^2 x d^2 unitary
            x: Half-integer site label of the right site

        Returns:
            The updated state

        Raises:
            ValueError: If the gate is not unitary
        """
        pass

    @abstractmethod
    def evolve(self, state: PureState, gates: GateAssignment, steps: int) -> PureState:
        """
        Apply ``steps`` brick-work steps (odd layer, then even layer).

        Args:
            state: Input state
            gates: Gate assignment covering at least ``steps`` steps
            steps: Number of time steps

        Returns:
            The evolved state
        """
        pass
