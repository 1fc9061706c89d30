"""
Entities for reduced states and the A|B|C tripartition of the chain.
"""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

STATE_TOL = 1e-10


@dataclass(frozen=True)
class Partition:
    """
    Tripartition of a ring of L cells into adjacent regions A, B and the
    complement C.

    Sizes are counted in cells (two sites each). Region A starts at cell
    ``offset``; the interfaces are the cell boundaries ``x_CA``, ``x_AB`` and
    ``x_BC``, taken modulo L.
    """

    L_A: int
    L_B: int
    L_C: int
    offset: int = 0

    def __post_init__(self):
        """Validate region sizes."""
        if self.L_A < 1 or self.L_B < 1:
            raise ValueError(
                f"Regions A and B need at least one cell, got ({self.L_A}, {self.L_B})"
            )
        if self.L_C < 0:
            raise ValueError(f"L_C must be non-negative, got {self.L_C}")

    @property
    def L(self) -> int:
        return self.L_A + self.L_B + self.L_C

    @property
    def x_CA(self) -> int:
        return self.offset % self.L

    @property
    def x_AB(self) -> int:
        return (self.offset + self.L_A) % self.L

    @property
    def x_BC(self) -> int:
        return (self.offset + self.L_A + self.L_B) % self.L

    @property
    def interfaces(self) -> Tuple[int, int, int]:
        return self.x_CA, self.x_AB, self.x_BC

    def check_lattice(self, L: int) -> None:
        if self.L != L:
            raise ValueError(
                f"Partition sizes sum to {self.L}, lattice has L={L}"
            )

    def _cells(self, start: int, length: int) -> List[int]:
        return [(start + k) % self.L for k in range(length)]

    def region_sites(self, region: str) -> List[int]:
        """Sorted site indices of region 'A', 'B', 'C' or 'AB'."""
        if region == "AB":
            return sorted(self.region_sites("A") + self.region_sites("B"))
        starts = {"A": (self.x_CA, self.L_A), "B": (self.x_AB, self.L_B),
                  "C": (self.x_BC, self.L_C)}
        if region not in starts:
            raise ValueError(f"Unknown region '{region}'")
        start, length = starts[region]
        sites = []
        for cell in self._cells(start, length):
            sites.extend([2 * cell, 2 * cell + 1])
        return sorted(sites)

    def in_regime(self, t: int) -> bool:
        """Early-time condition ``min(L_A, L_B, L_C) >= 2t``."""
        return min(self.L_A, self.L_B, self.L_C) >= 2 * t

    def to_dict(self):
        return {"L_A": self.L_A, "L_B": self.L_B, "L_C": self.L_C, "offset": self.offset}


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Density matrix over the retained ``sites`` (ascending order). The row
    index is the row-major flattening of the site values in that order.
    """

    matrix: np.ndarray
    sites: Tuple[int, ...]
    d: int

    def __post_init__(self):
        """Check dimension, Hermiticity, trace and positivity."""
        matrix = np.array(self.matrix, dtype=np.complex128)
        dim = self.d ** len(self.sites)
        if matrix.shape != (dim, dim):
            raise ValueError(
                f"Density matrix over {len(self.sites)} sites needs shape "
                f"{(dim, dim)}, got {matrix.shape}"
            )
        if len(set(self.sites)) != len(self.sites):
            raise ValueError(f"Duplicate sites in {self.sites}")
        if float(np.max(np.abs(matrix - matrix.conj().T))) > STATE_TOL:
            raise ValueError("Density matrix is not Hermitian")
        if abs(np.trace(matrix) - 1.0) > STATE_TOL:
            raise ValueError(f"Density matrix has trace {np.trace(matrix).real:.3e}")
        lowest = float(np.linalg.eigvalsh((matrix + matrix.conj().T) / 2)[0])
        if lowest < -STATE_TOL:
            raise ValueError(f"Density matrix has negative eigenvalue {lowest:.3e}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def tensor(self) -> np.ndarray:
        """View with one ket axis and one bra axis per site."""
        return self.matrix.reshape((self.d,) * (2 * self.n_sites))

    def positions(self, sites) -> List[int]:
        """Axis positions of ``sites`` among the retained sites."""
        missing = [s for s in sites if s not in self.sites]
        if missing:
            raise ValueError(f"Sites {missing} are not part of this density matrix")
        return [self.sites.index(s) for s in sites]


@dataclass(frozen=True, eq=False)
class NegativitySpectrum:
    """Eigenvalues of a partially transposed density matrix, descending."""

    eigenvalues: Tuple[float, ...]

    def __post_init__(self):
        """Sort and check the trace."""
        values = tuple(sorted((float(v) for v in self.eigenvalues), reverse=True))
        if abs(sum(values) - 1.0) > STATE_TOL:
            raise ValueError(f"Partial transpose spectrum sums to {sum(values):.3e}")
        object.__setattr__(self, "eigenvalues", values)

    @property
    def negative_count(self) -> int:
        return sum(1 for v in self.eigenvalues if v < -STATE_TOL)

    @property
    def trace_norm(self) -> float:
        return float(sum(abs(v) for v in self.eigenvalues))

    def to_dict(self):
        return {"eigenvalues": list(self.eigenvalues)}
