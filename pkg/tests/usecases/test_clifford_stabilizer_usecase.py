"""
Unit tests for the CliffordStabilizerUseCase.
"""
import numpy as np
import pytest

from src.entities.circuit import GateAssignment, LatticeSpec, PureState
from src.entities.density_matrix import Partition
from src.entities.experiment import CircuitConfig
from src.entities.stabilizer import StabilizerTableau
from src.infrastructure.services.tensor_core import NumpyTensorCore
from src.usecases.circuit_evolution_usecase import CircuitEvolutionUseCase, swap_gate
from src.usecases.clifford_stabilizer_usecase import CliffordStabilizerUseCase, apply_word
from src.usecases.entanglement_oracle_usecase import EntanglementOracleUseCase


@pytest.fixture
def oracle():
    return EntanglementOracleUseCase(linear_algebra=NumpyTensorCore())


@pytest.fixture
def stabilizer(oracle):
    return CliffordStabilizerUseCase(oracle=oracle)


@pytest.fixture
def circuit():
    return CircuitEvolutionUseCase(linear_algebra=NumpyTensorCore())


def _evolved(tableau, *steps):
    """Apply (word, left, right) steps to a copy of ``tableau``."""
    x, z, r = tableau.x.copy(), tableau.z.copy(), tableau.r.copy()
    for word, left, right in steps:
        apply_word(x, z, r, word, left, right)
    return StabilizerTableau(x=x, z=z, r=r)


class TestTableauUpdates:
    """Tests for the elementary tableau updates."""

    def test_bell_pair(self, stabilizer):
        """Test that H then CNOT stabilizes |00> + |11> by XX and ZZ."""
        tableau = _evolved(StabilizerTableau.zero_state(2), (("H0", "CNOT01"), 0, 1))

        assert sorted(tableau.stabilizer_strings()) == ["+XX", "+ZZ"]
        assert tableau.is_valid()
        assert stabilizer.stabilizer_entropy(tableau, [0]) == 1

    def test_phase_sign(self):
        """Test that H S S H = X flips the sign of the Z stabilizer."""
        tableau = _evolved(StabilizerTableau.zero_state(1), (("H0", "S0", "S0", "H0"), 0, 0))

        assert tableau.stabilizer_strings() == ["-Z"]

    def test_unknown_letter(self):
        """Test that only H, S and CNOT are accepted."""
        tableau = StabilizerTableau.zero_state(2)
        x, z, r = tableau.x.copy(), tableau.z.copy(), tableau.r.copy()

        with pytest.raises(ValueError):
            apply_word(x, z, r, ("T0",), 0, 1)

    def test_zero_state_entropy(self, stabilizer):
        """Test that a product state has no stabilizer entropy."""
        tableau = StabilizerTableau.zero_state(4)

        assert stabilizer.stabilizer_entropy(tableau, [0, 1]) == 0
        assert stabilizer.stabilizer_entropy(tableau, []) == 0


class TestCliffordEvolve:
    """Tests for brick-work tableau evolution."""

    def test_swap_family(self, stabilizer):
        """Test that SWAP circuits keep the all-zero state."""
        lattice = LatticeSpec(d=2, L=3)
        gates = GateAssignment.constant(lattice, 2, swap_gate(2), family="swap")

        tableau = stabilizer.clifford_evolve(StabilizerTableau.zero_state(6), gates, 2)

        assert sorted(tableau.stabilizer_strings()) == sorted(
            "+" + "I" * q + "Z" + "I" * (5 - q) for q in range(6))

    def test_rejects_custom_gate(self, stabilizer):
        """Test that gates without a Clifford word are refused."""
        lattice = LatticeSpec(d=2, L=2)
        gates = GateAssignment.constant(lattice, 1, np.eye(4))

        with pytest.raises(ValueError):
            stabilizer.clifford_evolve(StabilizerTableau.zero_state(4), gates, 1)

    def test_rejects_qudits(self, stabilizer):
        """Test that the tableau engine is qubit-only."""
        lattice = LatticeSpec(d=3, L=2)
        gates = GateAssignment.constant(lattice, 1, np.eye(9), family="identity")

        with pytest.raises(ValueError):
            stabilizer.clifford_evolve(StabilizerTableau.zero_state(4), gates, 1)

    def test_rejects_size_mismatch(self, stabilizer):
        """Test that the tableau must cover the chain."""
        gates = GateAssignment.constant(LatticeSpec(d=2, L=2), 1, np.eye(4), family="identity")

        with pytest.raises(ValueError):
            stabilizer.clifford_evolve(StabilizerTableau.zero_state(6), gates, 1)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_entropy_matches_state_vector(self, stabilizer, circuit, oracle, seed):
        """Test S_2 / ln 2 of the dense state against the GF(2) rank."""
        config = CircuitConfig.model_validate(
            {"d": 2, "L": 3, "t_max": 2, "gate_family": "clifford", "seed": seed})
        _, gates, _, state = circuit.prepare(config, steps=2)

        tableau = stabilizer.clifford_evolve(StabilizerTableau.zero_state(6), gates, 2)

        assert tableau.is_valid()
        for region in ([0, 1], [2, 3, 4], [5, 0, 1]):
            dense = oracle.region_entropy(state, region, 2.0) / np.log(2)
            assert stabilizer.stabilizer_entropy(tableau, region) == pytest.approx(dense,
                                                                                  abs=1e-9)


class TestGhzBellCounts:
    """Tests for the e_AB / g_ABC decomposition."""

    def test_ghz_on_three_regions(self, stabilizer):
        """Test that a GHZ state across A, B and C gives g_ABC = 1 and no Bell pairs."""
        tableau = _evolved(StabilizerTableau.zero_state(6),
                           (("H0", "CNOT01"), 0, 2), (("CNOT01",), 2, 4))
        amplitudes = np.zeros((2,) * 6, dtype=np.complex128)
        amplitudes[0, 0, 0, 0, 0, 0] = amplitudes[1, 0, 1, 0, 1, 0] = 2 ** -0.5
        state = PureState(amplitudes=amplitudes, lattice=LatticeSpec(d=2, L=3))

        counts = stabilizer.ghz_bell_counts(tableau, Partition(L_A=1, L_B=1, L_C=1), state)

        assert counts.to_dict() == {"e_AB": 0, "e_BC": 0, "e_CA": 0, "g_ABC": 1}
        assert (counts.s_A, counts.s_B, counts.s_C) == (1, 1, 1)

    def test_bell_pair_across_ab(self, stabilizer):
        """Test a Bell pair between the last site of A and the first site of B."""
        tableau = _evolved(StabilizerTableau.zero_state(6), (("H0", "CNOT01"), 1, 2))
        amplitudes = np.zeros((2,) * 6, dtype=np.complex128)
        amplitudes[0, 0, 0, 0, 0, 0] = amplitudes[0, 1, 1, 0, 0, 0] = 2 ** -0.5
        state = PureState(amplitudes=amplitudes, lattice=LatticeSpec(d=2, L=3))

        counts = stabilizer.ghz_bell_counts(tableau, Partition(L_A=1, L_B=1, L_C=1), state)

        assert counts.to_dict() == {"e_AB": 1, "e_BC": 0, "e_CA": 0, "g_ABC": 0}

    def test_early_time_clifford_has_no_ghz(self, stabilizer, circuit):
        """Test g_ABC = 0 for a t = 1 Clifford quench on (2, 2, 2)."""
        config = CircuitConfig.model_validate(
            {"d": 2, "L": 6, "t_max": 1, "gate_family": "clifford", "seed": 4})
        _, gates, _, state = circuit.prepare(config, steps=1)
        tableau = stabilizer.clifford_evolve(StabilizerTableau.zero_state(12), gates, 1)

        counts = stabilizer.ghz_bell_counts(tableau, Partition(L_A=2, L_B=2, L_C=2), state)

        assert counts.g_ABC == 0
