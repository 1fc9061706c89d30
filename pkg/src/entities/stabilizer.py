"""
Stabilizer-state entities over GF(2).
"""
from dataclasses import dataclass
from typing import Dict, List

import numpy as np


def gf2_rank(matrix: np.ndarray) -> int:
    """Rank over GF(2) by row reduction on a copy."""
    rows = np.array(matrix, dtype=np.uint8) % 2
    rank = 0
    n_rows, n_cols = rows.shape
    for col in range(n_cols):
        pivots = np.nonzero(rows[rank:, col])[0]
        if pivots.size == 0:
            continue
        pivot = rank + pivots[0]
        if pivot != rank:
            rows[[rank, pivot]] = rows[[pivot, rank]]
        below = np.nonzero(rows[:, col])[0]
        below = below[below != rank]
        rows[below] ^= rows[rank]
        rank += 1
        if rank == n_rows:
            break
    return rank


@dataclass(frozen=True, eq=False)
class StabilizerTableau:
    """
    CHP tableau for N qubits.

    Rows ``0..N-1`` are destabilizers, rows ``N..2N-1`` stabilizers.
    ``x[i, j]`` and ``z[i, j]`` are the X and Z bits of generator i on qubit
    j; ``r[i]`` is the sign bit (0 for +, 1 for -).
    """

    x: np.ndarray
    z: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        """Check block shapes and freeze the bit arrays."""
        x = np.array(self.x, dtype=np.uint8) % 2
        z = np.array(self.z, dtype=np.uint8) % 2
        r = np.array(self.r, dtype=np.uint8).reshape(-1) % 2
        if x.ndim != 2 or x.shape[0] != 2 * x.shape[1]:
            raise ValueError(f"Tableau X block must be 2N x N, got {x.shape}")
        if z.shape != x.shape or r.shape != (x.shape[0],):
            raise ValueError("Tableau blocks have inconsistent shapes")
        for array in (x, z, r):
            array.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "r", r)

    @classmethod
    def zero_state(cls, n: int) -> "StabilizerTableau":
        """Tableau of ``|0...0>``: destabilizers X_i, stabilizers Z_i."""
        if n < 1:
            raise ValueError(f"Number of qubits must be positive, got {n}")
        x = np.zeros((2 * n, n), dtype=np.uint8)
        z = np.zeros((2 * n, n), dtype=np.uint8)
        x[np.arange(n), np.arange(n)] = 1
        z[n + np.arange(n), np.arange(n)] = 1
        return cls(x=x, z=z, r=np.zeros(2 * n, dtype=np.uint8))

    @property
    def n(self) -> int:
        return self.x.shape[1]

    @property
    def generator_matrix(self) -> np.ndarray:
        """Stabilizer rows as an N x 2N (X|Z) matrix over GF(2)."""
        return np.concatenate([self.x[self.n:], self.z[self.n:]], axis=1)

    def is_valid(self) -> bool:
        """Stabilizers commute pairwise and are independent over GF(2)."""
        g = self.generator_matrix.astype(np.int64)
        n = self.n
        symplectic = (g[:, :n] @ g[:, n:].T + g[:, n:] @ g[:, :n].T) % 2
        if np.any(symplectic):
            return False
        return gf2_rank(self.generator_matrix) == n

    def stabilizer_strings(self) -> List[str]:
        """Signed Pauli strings of the stabilizers, qubit 0 first."""
        letters = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
        strings = []
        for row in range(self.n, 2 * self.n):
            sign = "-" if self.r[row] else "+"
            paulis = "".join(
                letters[(int(self.x[row, q]), int(self.z[row, q]))] for q in range(self.n)
            )
            strings.append(sign + paulis)
        return strings


@dataclass(frozen=True)
class CliffordDecomposition:
    """Bell-pair counts per region pair and the tripartite GHZ count."""

    e_AB: int
    e_BC: int
    e_CA: int
    g_ABC: int

    def __post_init__(self):
        """Counts are non-negative integers."""
        for name in ("e_AB", "e_BC", "e_CA", "g_ABC"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value}")

    @property
    def s_A(self) -> int:
        return self.e_AB + self.e_CA + self.g_ABC

    @property
    def s_B(self) -> int:
        return self.e_AB + self.e_BC + self.g_ABC

    @property
    def s_C(self) -> int:
        return self.e_CA + self.e_BC + self.g_ABC

    def to_dict(self) -> Dict[str, int]:
        return {"e_AB": self.e_AB, "e_BC": self.e_BC, "e_CA": self.e_CA,
                "g_ABC": self.g_ABC}
