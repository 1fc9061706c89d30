"""
CHP tableau evolution of qubit Clifford brick-work circuits and the
Bell/GHZ decomposition of the resulting stabilizer states.
"""
import logging
from typing import Dict, Iterable, Tuple

import numpy as np

from src.entities.circuit import GateAssignment, PureState
from src.entities.density_matrix import Partition
from src.entities.exceptions import DecompositionError
from src.entities.stabilizer import CliffordDecomposition, StabilizerTableau, gf2_rank
from src.interfaces.services.entanglement_service import EntanglementService
from src.interfaces.services.stabilizer_service import StabilizerService

logger = logging.getLogger(__name__)

# Words of the families that are Clifford without being drawn as words.
FIXED_WORDS: Dict[str, Tuple[str, ...]] = {
    "identity": (),
    "swap": ("CNOT01", "CNOT10", "CNOT01"),
}


def _hadamard(x: np.ndarray, z: np.ndarray, r: np.ndarray, a: int) -> None:
    r ^= x[:, a] & z[:, a]
    x[:, a], z[:, a] = z[:, a].copy(), x[:, a].copy()


def _phase(x: np.ndarray, z: np.ndarray, r: np.ndarray, a: int) -> None:
    r ^= x[:, a] & z[:, a]
    z[:, a] ^= x[:, a]


def _cnot(x: np.ndarray, z: np.ndarray, r: np.ndarray, a: int, b: int) -> None:
    r ^= x[:, a] & z[:, b] & (x[:, b] ^ z[:, a] ^ 1)
    x[:, b] ^= x[:, a]
    z[:, a] ^= z[:, b]


def apply_word(x: np.ndarray, z: np.ndarray, r: np.ndarray, word: Iterable[str],
               left: int, right: int) -> None:
    """Apply a two-qubit word in place; qubit 0 of the word is ``left``."""
    qubits = (left, right)
    for name in word:
        if name in ("H0", "H1"):
            _hadamard(x, z, r, qubits[int(name[1])])
        elif name in ("S0", "S1"):
            _phase(x, z, r, qubits[int(name[1])])
        elif name in ("CNOT01", "CNOT10"):
            _cnot(x, z, r, qubits[int(name[4])], qubits[int(name[5])])
        else:
            raise ValueError(f"Unknown elementary Clifford '{name}'")


class CliffordStabilizerUseCase(StabilizerService):
    """Stabilizer entropies by GF(2) rank and the e_AB / g_ABC counts."""

    def __init__(self, oracle: EntanglementService, integrality_tol: float = 1e-6):
        """
        Initialize the stabilizer engine.

        Args:
            oracle: Dense negativity and mutual information for the counts
            integrality_tol: Allowed distance of a count from an integer
        """
        self.oracle = oracle
        self.integrality_tol = integrality_tol

    def _word(self, gates: GateAssignment, bond: int, layer: int) -> Tuple[str, ...]:
        gate_id = gates.gate_ids[(bond % gates.lattice.n_sites, layer)]
        words = gates.metadata.get("words", {})
        if gate_id in words:
            return tuple(words[gate_id])
        if gates.family in FIXED_WORDS:
            return FIXED_WORDS[gates.family]
        raise ValueError(f"Gate '{gate_id}' is not a known Clifford word")

    def clifford_evolve(self, tableau: StabilizerTableau, gates: GateAssignment,
                        steps: int) -> StabilizerTableau:
        lattice = gates.lattice
        if lattice.d != 2:
            raise ValueError(f"Stabilizer evolution needs d = 2, got {lattice.d}")
        if tableau.n != lattice.n_sites:
            raise ValueError(f"Tableau has {tableau.n} qubits, lattice has {lattice.n_sites}")
        x, z, r = tableau.x.copy(), tableau.z.copy(), tableau.r.copy()
        for layer, bonds in gates.layers(steps):
            for bond in bonds:
                left, right = lattice.bond_sites(bond)
                apply_word(x, z, r, self._word(gates, bond, layer), left, right)
        evolved = StabilizerTableau(x=x, z=z, r=r)
        logger.debug(f"Evolved tableau over {steps} steps on {lattice.n_sites} qubits")
        return evolved

    def stabilizer_entropy(self, tableau: StabilizerTableau, region: Iterable[int]) -> int:
        columns = sorted({int(q) % tableau.n for q in region})
        if not columns:
            return 0
        stabilizers = slice(tableau.n, 2 * tableau.n)
        restricted = np.concatenate(
            [tableau.x[stabilizers][:, columns], tableau.z[stabilizers][:, columns]], axis=1
        )
        return gf2_rank(restricted) - len(columns)

    def _integral(self, name: str, value: float) -> int:
        nearest = int(round(value))
        if abs(value - nearest) > self.integrality_tol:
            raise DecompositionError(f"{name} = {value:.9f} is not integral")
        return nearest

    def ghz_bell_counts(self, tableau: StabilizerTableau, partition: Partition,
                        state: PureState) -> CliffordDecomposition:
        partition.check_lattice(state.lattice.L)
        s_A = self.stabilizer_entropy(tableau, partition.region_sites("A"))
        s_B = self.stabilizer_entropy(tableau, partition.region_sites("B"))
        s_C = self.stabilizer_entropy(tableau, partition.region_sites("C"))

        rho_AB = self.oracle.reduce(state, partition.region_sites("AB"))
        negativity = self.oracle.log_negativity(rho_AB, partition.region_sites("A"))
        information = self.oracle.mutual_information(state, partition, 2.0)
        e_AB = self._integral("E/ln2", negativity / np.log(2))
        g_ABC = self._integral("I/ln2 - 2 e_AB", information / np.log(2) - 2 * e_AB)
        e_CA = s_A - e_AB - g_ABC
        e_BC = s_B - e_AB - g_ABC
        if min(e_CA, e_BC, g_ABC) < 0 or e_CA + e_BC + g_ABC != s_C:
            raise DecompositionError(
                f"Counts (e_AB={e_AB}, e_BC={e_BC}, e_CA={e_CA}, g={g_ABC}) do not "
                f"reproduce entropies (s_A={s_A}, s_B={s_B}, s_C={s_C})"
            )
        return CliffordDecomposition(e_AB=e_AB, e_BC=e_BC, e_CA=e_CA, g_ABC=g_ABC)
