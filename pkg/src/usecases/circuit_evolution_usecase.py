"""
Brick-work circuit construction and exact state-vector evolution.
"""
import logging
from functools import reduce
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.entities.circuit import (
    GateAssignment, InitialState, LatticeSpec, PureState, is_unitary,
)
from src.entities.exceptions import SizeGuardError
from src.entities.experiment import CircuitConfig, InitConfig
from src.infrastructure.services.tensor_core import apply_on_axes
from src.interfaces.services.circuit_service import CircuitService
from src.interfaces.services.linear_algebra_service import LinearAlgebraService

logger = logging.getLogger(__name__)

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
_S = np.diag([1, 1j]).astype(np.complex128)
_I2 = np.eye(2, dtype=np.complex128)

# Two-qubit elementary Clifford gates; qubit 0 is the left site.
CLIFFORD_OPS: Dict[str, np.ndarray] = {
    "H0": np.kron(_H, _I2),
    "H1": np.kron(_I2, _H),
    "S0": np.kron(_S, _I2),
    "S1": np.kron(_I2, _S),
    "CNOT01": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                       dtype=np.complex128),
    "CNOT10": np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]],
                       dtype=np.complex128),
}
CLIFFORD_WORD_LENGTH = 30
STATE_STREAM = 1


def swap_gate(d: int) -> np.ndarray:
    swap = np.zeros((d * d, d * d), dtype=np.complex128)
    for a in range(d):
        for b in range(d):
            swap[b * d + a, a * d + b] = 1.0
    return swap


def clifford_word_matrix(word: Tuple[str, ...]) -> np.ndarray:
    """Unitary of a word of elementary Cliffords, ``word[0]`` applied first."""
    return reduce(lambda acc, name: CLIFFORD_OPS[name] @ acc, word,
                  np.eye(4, dtype=np.complex128))


def random_site_state(d: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return psi / np.linalg.norm(psi)


def _complex_entries(entries: List[List[float]]) -> np.ndarray:
    return np.array([complex(re, im) for re, im in entries], dtype=np.complex128)


class CircuitEvolutionUseCase(CircuitService):
    """Gate families, initial states and exact brick-work evolution."""

    def __init__(self, linear_algebra: LinearAlgebraService, max_state_sites: int = 24):
        """
        Initialize the circuit use case.

        Args:
            linear_algebra: Source of Haar-random unitaries
            max_state_sites: Longest chain stored as a dense state vector
        """
        self.linear_algebra = linear_algebra
        self.max_state_sites = max_state_sites

    # Gate families

    def _dual_unitary_gate(self, d: int, coupling: float, rng: np.random.Generator) -> np.ndarray:
        """``(u1 x u2) SWAP exp(-i J z z) (u3 x u4)`` with Haar single-site dressing."""
        z = 1.0 - 2.0 * np.arange(d) / (d - 1)
        phases = np.exp(-1j * coupling * np.outer(z, z).reshape(-1))
        core = swap_gate(d) @ np.diag(phases)
        singles = [self.linear_algebra.haar_unitary(d, int(rng.integers(2 ** 62))).array
                   for _ in range(4)]
        return np.kron(singles[0], singles[1]) @ core @ np.kron(singles[2], singles[3])

    def _draw_gate(self, config: CircuitConfig, rng: np.random.Generator):
        d = config.d
        family = config.gate_family
        if family == "haar":
            return self.linear_algebra.haar_unitary(d * d, int(rng.integers(2 ** 62))).array, None
        if family == "dual_unitary":
            return self._dual_unitary_gate(d, config.coupling, rng), None
        if family == "clifford":
            names = sorted(CLIFFORD_OPS)
            word = tuple(names[i] for i in rng.integers(len(names), size=CLIFFORD_WORD_LENGTH))
            return clifford_word_matrix(word), word
        if family == "identity":
            return np.eye(d * d, dtype=np.complex128), None
        if family == "swap":
            return swap_gate(d), None
        if family == "custom":
            return _complex_entries(config.custom_gate).reshape(d * d, d * d), None
        raise ValueError(f"Unknown gate family '{family}'")

    def make_gates(self, config: CircuitConfig, steps: Optional[int] = None) -> GateAssignment:
        lattice = LatticeSpec(d=config.d, L=config.L)
        steps = config.t_max if steps is None else steps
        rng = np.random.default_rng(config.seed)
        words: Dict[str, Tuple[str, ...]] = {}
        if config.homogeneous or config.gate_family in ("identity", "swap", "custom"):
            gate, word = self._draw_gate(config, rng)
            gate_id = config.gate_family
            if word is not None:
                words[gate_id] = word
            assignment = GateAssignment.constant(lattice, steps, gate, gate_id=gate_id,
                                                 family=config.gate_family)
            if words:
                assignment.metadata["words"] = words
            return assignment

        ids: Dict[Tuple[int, int], str] = {}
        table: Dict[str, np.ndarray] = {}
        for layer in range(2 * steps):
            for bond in lattice.layer_bonds(layer):
                gate, word = self._draw_gate(config, rng)
                gate_id = f"{config.gate_family}_{layer}_{bond}"
                ids[(bond, layer)] = gate_id
                table[gate_id] = gate
                if word is not None:
                    words[gate_id] = word
        logger.debug(f"Drew {len(table)} independent '{config.gate_family}' gates")
        return GateAssignment(lattice=lattice, steps=steps, gate_ids=ids, gate_table=table,
                              family=config.gate_family, metadata={"words": words})

    # Initial states

    def _site_vector(self, init: InitConfig, d: int, rng: np.random.Generator) -> np.ndarray:
        if init.state == "zero":
            psi = np.zeros(d, dtype=np.complex128)
            psi[0] = 1.0
            return psi
        if init.state == "plus":
            return np.ones(d, dtype=np.complex128) / np.sqrt(d)
        if init.state == "random":
            return random_site_state(d, rng)
        psi = _complex_entries(init.amplitudes)
        if psi.size != d:
            raise ValueError(f"Custom site state needs {d} amplitudes, got {psi.size}")
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise ValueError("Custom site state has zero norm")
        return psi / norm

    def _mps_tensor(self, config: CircuitConfig) -> np.ndarray:
        mps = config.init.mps
        d, chi = config.d, mps.chi
        rng = np.random.default_rng(mps.seed)
        if mps.preset == "ghz":
            W = np.zeros((2, 2, d, d), dtype=np.complex128)
            W[0, 0, 0, 0] = 1.0
            W[1, 1, d - 1, d - 1] = 1.0
            return W
        if mps.preset == "custom":
            entries = _complex_entries(mps.tensor)
            if entries.size != chi * chi * d * d:
                raise ValueError(
                    f"Custom MPS tensor needs {chi * chi * d * d} entries, got {entries.size}"
                )
            return entries.reshape(chi, chi, d, d)
        psi = self._site_vector(config.init, d, rng)
        W = np.zeros((chi, chi, d, d), dtype=np.complex128)
        W[0, 0] = np.outer(psi, psi)
        if mps.preset == "product":
            return W[:1, :1].copy()
        noise = rng.standard_normal(W.shape) + 1j * rng.standard_normal(W.shape)
        noise /= np.linalg.norm(noise)
        if mps.preset == "random":
            return noise
        return W + mps.epsilon * noise

    def make_initial_state(self, config: CircuitConfig) -> InitialState:
        init = config.init
        if init.kind == "mps":
            return InitialState.mps([self._mps_tensor(config)])
        rng = np.random.default_rng([config.seed, STATE_STREAM])
        n_sites = 2 * config.L
        if not config.homogeneous and init.state != "custom":
            return InitialState.product([random_site_state(config.d, rng) for _ in range(n_sites)])
        return InitialState.uniform_product(self._site_vector(init, config.d, rng), n_sites)

    # Evolution

    def build_state(self, lattice: LatticeSpec, init: InitialState) -> PureState:
        init.check_lattice(lattice)
        if lattice.n_sites > self.max_state_sites:
            raise SizeGuardError(
                f"{lattice.n_sites} sites exceed the state-vector guard of {self.max_state_sites}"
            )
        if init.kind == "product":
            factors = [init.site_state(j) for j in range(lattice.n_sites)]
            amplitudes = reduce(np.multiply.outer, factors)
        else:
            chi, d = init.chi, lattice.d
            ring = init.cell_tensor(0).reshape(chi, chi, d * d)
            for cell in range(1, lattice.L):
                W = init.cell_tensor(cell).reshape(chi, chi, d * d)
                ring = np.einsum("abS,bcs->acSs", ring, W).reshape(chi, chi, -1)
            amplitudes = np.einsum("aaS->S", ring)
            norm = np.linalg.norm(amplitudes)
            if norm < 1e-300:
                raise ValueError("MPS ring contracts to the zero vector")
            logger.debug(f"MPS ring norm before normalization: {norm:.6e}")
            amplitudes = amplitudes / norm
        return PureState(amplitudes=amplitudes, lattice=lattice)

    @staticmethod
    def _apply_bond(amplitudes: np.ndarray, gate: np.ndarray, left: int, right: int) -> np.ndarray:
        d = amplitudes.shape[0]
        return apply_on_axes(amplitudes, gate.reshape(d, d, d, d), [left, right])

    def apply_two_site(self, state: PureState, gate: np.ndarray, x: float) -> PureState:
        gate = np.asarray(gate, dtype=np.complex128)
        lattice = state.lattice
        dim = lattice.d ** 2
        if gate.shape != (dim, dim):
            raise ValueError(f"Gate has shape {gate.shape}, expected {(dim, dim)}")
        if not is_unitary(gate):
            raise ValueError("Gate is not unitary")
        right = lattice.site_index(x)
        left = (right - 1) % lattice.n_sites
        return PureState(amplitudes=self._apply_bond(state.amplitudes, gate, left, right),
                         lattice=lattice)

    def evolve(self, state: PureState, gates: GateAssignment, steps: int) -> PureState:
        if steps < 0:
            raise ValueError(f"steps must be non-negative, got {steps}")
        lattice = state.lattice
        if gates.lattice != lattice:
            raise ValueError("Gate assignment and state live on different lattices")
        amplitudes = state.amplitudes
        for layer, bonds in gates.layers(steps):
            for bond in bonds:
                left, right = lattice.bond_sites(bond)
                amplitudes = self._apply_bond(amplitudes, gates.gate(bond, layer), left, right)
            if layer % 2 == 1:
                drift = abs(np.linalg.norm(amplitudes) - 1.0)
                if drift > 1e-10:
                    logger.warning(f"Norm drift {drift:.3e} after step {(layer + 1) // 2}")
        return PureState(amplitudes=amplitudes, lattice=lattice)

    def prepare(self, config: CircuitConfig, steps: Optional[int] = None):
        """Lattice, gates, initial state and the evolved state of a document."""
        steps = config.t_max if steps is None else steps
        lattice = LatticeSpec(d=config.d, L=config.L)
        gates = self.make_gates(config, steps=max(steps, config.t_max))
        init = self.make_initial_state(config)
        state = self.evolve(self.build_state(lattice, init), gates, steps)
        return lattice, gates, init, state
