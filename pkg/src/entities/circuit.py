"""
Entities describing a brick-work circuit on a periodic chain of 2L qudits.

Site convention: the public site labels 1/2, 1, 3/2, ..., L are mapped to the
integer indices 0, 1, ..., 2L-1 through ``index = 2 * label - 1``. A bond is
named by the index of its left site; odd-layer bonds start on even indices
(pairs (2k, 2k+1)) and even-layer bonds start on odd indices (pairs
(2k+1, 2k+2), wrapping around). Half-step layers are numbered
``layer = 0, 1, ..., 2t-1``: even layer numbers are odd-pair layers, odd layer
numbers are even-pair layers, so time step ``tau`` (1-based) owns layers
``2*tau - 2`` and ``2*tau - 1``.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

GateKey = Tuple[int, int]

UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class LatticeSpec:
    """Local dimension ``d`` and half chain length ``L`` (2L sites)."""

    d: int
    L: int
    v_max: int = 1

    def __post_init__(self):
        """Validate lattice parameters."""
        if self.d < 2:
            raise ValueError(f"Local dimension must be at least 2, got {self.d}")
        if self.L < 2:
            raise ValueError(f"L must be at least 2, got {self.L}")
        if self.v_max != 1:
            raise ValueError("Brick-work circuits have maximal speed v_max = 1")

    @property
    def n_sites(self) -> int:
        return 2 * self.L

    @property
    def hilbert_dim(self) -> int:
        return self.d ** self.n_sites

    @staticmethod
    def site_label(index: int) -> float:
        """Public half-integer label of an integer site index."""
        return (index + 1) / 2

    def site_index(self, label: float) -> int:
        """Integer index of a half-integer label, periodic in 2L."""
        doubled = 2 * label
        if abs(doubled - round(doubled)) > 1e-12:
            raise ValueError(f"Site labels are multiples of 1/2, got {label}")
        return (int(round(doubled)) - 1) % self.n_sites

    def layer_bonds(self, layer: int) -> List[int]:
        """Left-site indices of the bonds acted on in a half-step layer."""
        start = 0 if layer % 2 == 0 else 1
        return list(range(start, self.n_sites, 2))

    def bond_sites(self, bond: int) -> Tuple[int, int]:
        return bond % self.n_sites, (bond + 1) % self.n_sites


def is_unitary(matrix: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    """Check ``U^dagger U = 1`` entrywise to ``tol``."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    residual = matrix.conj().T @ matrix - np.eye(matrix.shape[0])
    return float(np.max(np.abs(residual))) <= tol


@dataclass(frozen=True, eq=False)
class GateAssignment:
    """
    Gate identifier for every (bond, layer) pair of a circuit with
    ``steps`` time steps, plus the identifier -> matrix table.
    """

    lattice: LatticeSpec
    steps: int
    gate_ids: Mapping[GateKey, str]
    gate_table: Mapping[str, np.ndarray]
    family: str = "custom"
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        """Check coverage, gate dimensions and unitarity."""
        if self.steps < 0:
            raise ValueError(f"steps must be non-negative, got {self.steps}")
        dim = self.lattice.d ** 2
        table: Dict[str, np.ndarray] = {}
        for gate_id, matrix in self.gate_table.items():
            matrix = np.array(matrix, dtype=np.complex128)
            if matrix.shape != (dim, dim):
                raise ValueError(
                    f"Gate '{gate_id}' has shape {matrix.shape}, expected {(dim, dim)}"
                )
            if not is_unitary(matrix):
                raise ValueError(f"Gate '{gate_id}' is not unitary")
            matrix.setflags(write=False)
            table[gate_id] = matrix
        for layer in range(2 * self.steps):
            for bond in self.lattice.layer_bonds(layer):
                gate_id = self.gate_ids.get((bond, layer))
                if gate_id is None:
                    raise ValueError(f"No gate assigned to bond {bond}, layer {layer}")
                if gate_id not in table:
                    raise ValueError(f"Unknown gate identifier '{gate_id}'")
        object.__setattr__(self, "gate_table", table)
        object.__setattr__(self, "gate_ids", dict(self.gate_ids))

    @classmethod
    def constant(
        cls, lattice: LatticeSpec, steps: int, gate: np.ndarray, gate_id: str = "U",
        family: str = "custom",
    ) -> "GateAssignment":
        """Homogeneous assignment: the same gate everywhere."""
        ids = {
            (bond, layer): gate_id
            for layer in range(2 * steps)
            for bond in lattice.layer_bonds(layer)
        }
        return cls(lattice=lattice, steps=steps, gate_ids=ids,
                   gate_table={gate_id: gate}, family=family)

    @property
    def is_homogeneous(self) -> bool:
        return len(set(self.gate_ids.values())) <= 1

    def gate(self, bond: int, layer: int) -> np.ndarray:
        """Matrix of the gate at (bond, layer)."""
        return self.gate_table[self.gate_ids[(bond % self.lattice.n_sites, layer)]]

    def layers(self, steps: Optional[int] = None) -> Iterator[Tuple[int, List[int]]]:
        """Yield (layer, bonds) in application order for ``steps`` steps."""
        steps = self.steps if steps is None else steps
        if steps > self.steps:
            raise ValueError(f"Assignment covers {self.steps} steps, asked for {steps}")
        for layer in range(2 * steps):
            yield layer, self.lattice.layer_bonds(layer)

    def column_gates(self, cell: int, steps: int) -> Tuple[List[np.ndarray], List[np.ndarray]]:
        """
        Gates met by the dual evolution across cell ``cell``.

        Returns:
            (odd-layer gates on bond 2*cell, even-layer gates on bond 2*cell+1),
            each ordered by time step.
        """
        odd = [self.gate(2 * cell, 2 * tau) for tau in range(steps)]
        even = [self.gate(2 * cell + 1, 2 * tau + 1) for tau in range(steps)]
        return odd, even


@dataclass(frozen=True, eq=False)
class InitialState:
    """
    Product state (one unit vector per site) or two-site MPS (one
    ``(chi, chi, d, d)`` tensor ``W[mu, nu, s1, s2]`` per cell).
    """

    kind: str
    site_states: Tuple[np.ndarray, ...] = ()
    cell_tensors: Tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        """Validate the variant payload."""
        if self.kind == "product":
            if not self.site_states:
                raise ValueError("A product state needs at least one site vector")
            states = []
            for index, psi in enumerate(self.site_states):
                psi = np.array(psi, dtype=np.complex128).reshape(-1)
                if abs(np.vdot(psi, psi).real - 1.0) > 1e-10:
                    raise ValueError(f"Site state {index} is not normalised")
                psi.setflags(write=False)
                states.append(psi)
            object.__setattr__(self, "site_states", tuple(states))
        elif self.kind == "mps":
            if not self.cell_tensors:
                raise ValueError("An MPS needs at least one cell tensor")
            tensors = []
            for tensor in self.cell_tensors:
                tensor = np.array(tensor, dtype=np.complex128)
                if tensor.ndim != 4 or tensor.shape[0] != tensor.shape[1] \
                        or tensor.shape[2] != tensor.shape[3]:
                    raise ValueError(
                        f"MPS tensors have shape (chi, chi, d, d), got {tensor.shape}"
                    )
                tensor.setflags(write=False)
                tensors.append(tensor)
            if len({t.shape for t in tensors}) != 1:
                raise ValueError("All MPS cell tensors must share one shape")
            object.__setattr__(self, "cell_tensors", tuple(tensors))
        else:
            raise ValueError(f"Unknown initial-state kind '{self.kind}'")

    @classmethod
    def product(cls, states: Sequence[np.ndarray]) -> "InitialState":
        return cls(kind="product", site_states=tuple(states))

    @classmethod
    def uniform_product(cls, psi: np.ndarray, n_sites: int) -> "InitialState":
        return cls(kind="product", site_states=tuple(psi for _ in range(n_sites)))

    @classmethod
    def mps(cls, tensors: Sequence[np.ndarray]) -> "InitialState":
        return cls(kind="mps", cell_tensors=tuple(tensors))

    @property
    def chi(self) -> int:
        return 1 if self.kind == "product" else self.cell_tensors[0].shape[0]

    @property
    def d(self) -> int:
        if self.kind == "product":
            return self.site_states[0].size
        return self.cell_tensors[0].shape[2]

    def check_lattice(self, lattice: LatticeSpec) -> None:
        """Raise ValueError unless the state fits ``lattice``."""
        if self.d != lattice.d:
            raise ValueError(f"State has d={self.d}, lattice has d={lattice.d}")
        if self.kind == "product":
            if len(self.site_states) not in (1, lattice.n_sites):
                raise ValueError(
                    f"Product state has {len(self.site_states)} sites, "
                    f"lattice has {lattice.n_sites}"
                )
        elif len(self.cell_tensors) not in (1, lattice.L):
            raise ValueError(
                f"MPS has {len(self.cell_tensors)} cells, lattice has {lattice.L}"
            )

    def site_state(self, index: int) -> np.ndarray:
        if self.kind != "product":
            raise ValueError("Only product states have per-site vectors")
        return self.site_states[index % len(self.site_states)]

    def cell_tensor(self, cell: int) -> np.ndarray:
        """``W[mu, nu, s1, s2]`` of cell ``cell`` (sites 2*cell, 2*cell+1)."""
        if self.kind == "product":
            left = self.site_state(2 * cell)
            right = self.site_state(2 * cell + 1)
            return np.einsum("i,j->ij", left, right)[None, None, :, :]
        return self.cell_tensors[cell % len(self.cell_tensors)]

    @property
    def is_translation_invariant(self) -> bool:
        if self.kind == "product":
            first = self.site_states[0]
            return all(np.allclose(psi, first) for psi in self.site_states)
        first = self.cell_tensors[0]
        return all(np.allclose(w, first) for w in self.cell_tensors)


@dataclass(frozen=True, eq=False)
class PureState:
    """State vector on 2L sites stored as a ``(d,) * 2L`` tensor."""

    amplitudes: np.ndarray
    lattice: LatticeSpec

    def __post_init__(self):
        """Check the shape and freeze the buffer."""
        expected = (self.lattice.d,) * self.lattice.n_sites
        amplitudes = np.array(self.amplitudes, dtype=np.complex128)
        if amplitudes.size != self.lattice.hilbert_dim:
            raise ValueError(
                f"Expected {self.lattice.hilbert_dim} amplitudes, got {amplitudes.size}"
            )
        amplitudes = amplitudes.reshape(expected)
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))
