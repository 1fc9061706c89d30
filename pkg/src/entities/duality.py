"""
Entities of the space-time dual picture: dual gates, column transfer
matrices, their fixed points, replica permutations and MPS transfer data.

Column vectors are folded: a ket block ``(mu, seg_0, ..., seg_2t)`` followed
by the matching bra block, so a vector in H_t (x) H_t reshapes to a
``D x D`` matrix with ``D = chi * d**(2t+1)`` (rows ket, columns bra).
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator

from src.entities.tensor import ComplexTensor


def column_dim(t: int, d: int, chi: int = 1) -> int:
    """Dimension of one copy of the column space H_t."""
    return chi * d ** (2 * t + 1)


@dataclass(frozen=True, eq=False)
class DualGate:
    """Reshuffled gate tensor ``Ũ[i2, o2, i1, o1] = U[o1, o2, i1, i2]``."""

    tensor: np.ndarray
    source: str = ""

    def __post_init__(self):
        """Freeze the tensor and check its four equal legs."""
        tensor = np.array(self.tensor, dtype=np.complex128)
        if tensor.ndim != 4 or len(set(tensor.shape)) != 1:
            raise ValueError(f"A dual gate has shape (d, d, d, d), got {tensor.shape}")
        tensor.setflags(write=False)
        object.__setattr__(self, "tensor", tensor)

    @property
    def d(self) -> int:
        return self.tensor.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self.tensor.reshape(self.d ** 2, self.d ** 2)

    def is_unitary(self, tol: float = 1e-12) -> bool:
        """True iff the source gate is dual-unitary."""
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))) <= tol


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Matrix-free column transfer map on H_t (x) H_t for one cell."""

    t: int
    d: int
    chi: int
    operator: LinearOperator
    provenance: Dict[str, Any] = field(default_factory=dict)
    matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        """Check the operator dimension."""
        if self.t < 1:
            raise ValueError(f"Transfer matrices need t >= 1, got {self.t}")
        if self.operator.shape != (self.dim, self.dim):
            raise ValueError(
                f"Operator shape {self.operator.shape} does not match dimension {self.dim}"
            )
        if self.matrix is not None:
            matrix = np.array(self.matrix, dtype=np.complex128)
            if matrix.shape != (self.dim, self.dim):
                raise ValueError(f"Dense matrix has shape {matrix.shape}")
            matrix.setflags(write=False)
            object.__setattr__(self, "matrix", matrix)

    @property
    def column_dim(self) -> int:
        return column_dim(self.t, self.d, self.chi)

    @property
    def dim(self) -> int:
        return self.column_dim ** 2

    @property
    def cell(self) -> int:
        return int(self.provenance.get("cell", 0))

    def matvec(self, vector: np.ndarray) -> np.ndarray:
        return self.operator.matvec(vector)

    def rmatvec(self, vector: np.ndarray) -> np.ndarray:
        return self.operator.rmatvec(vector)


@dataclass(frozen=True, eq=False)
class FixedPointPair:
    """
    Right and left fixed points at the column boundary ``x`` normalised so
    that ``<l|r> = 1``.
    """

    l: np.ndarray
    r: np.ndarray
    t: int
    d: int
    chi: int = 1
    x: int = 0
    residual: float = 0.0

    def __post_init__(self):
        """Freeze both vectors and check their length."""
        dim = column_dim(self.t, self.d, self.chi) ** 2
        vectors = []
        for name, vector in (("l", self.l), ("r", self.r)):
            vector = np.array(vector, dtype=np.complex128).reshape(-1)
            if vector.size != dim:
                raise ValueError(f"Fixed point '{name}' has {vector.size} entries, expected {dim}")
            vector.setflags(write=False)
            vectors.append(vector)
        object.__setattr__(self, "l", vectors[0])
        object.__setattr__(self, "r", vectors[1])

    @property
    def column_dim(self) -> int:
        return column_dim(self.t, self.d, self.chi)

    @property
    def overlap(self) -> complex:
        return complex(np.vdot(self.l, self.r))

    @property
    def M_l(self) -> np.ndarray:
        return self.l.reshape(self.column_dim, self.column_dim)

    @property
    def M_r(self) -> np.ndarray:
        return self.r.reshape(self.column_dim, self.column_dim)

    @property
    def X(self) -> np.ndarray:
        """``M_l^dagger M_r``."""
        return self.M_l.conj().T @ self.M_r

    def rescaled(self, c: complex) -> "FixedPointPair":
        """Gauge transform ``r -> c r``, ``l -> l / conj(c)``."""
        return FixedPointPair(l=self.l / np.conj(c), r=self.r * c, t=self.t,
                              d=self.d, chi=self.chi, x=self.x, residual=self.residual)

    def to_dict(self) -> Dict[str, Any]:
        D = self.column_dim
        return {
            "t": self.t,
            "d": self.d,
            "chi": self.chi,
            "x": self.x,
            "residual": self.residual,
            "shape": [D, D],
            "l": ComplexTensor.from_array(self.l).to_dict()["data"],
            "r": ComplexTensor.from_array(self.r).to_dict()["data"],
            "M_l": ComplexTensor.from_array(self.M_l).to_dict(),
            "M_r": ComplexTensor.from_array(self.M_r).to_dict(),
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "FixedPointPair":
        D = int(payload["shape"][0])
        l = ComplexTensor.from_dict({"shape": [D * D], "data": payload["l"]})
        r = ComplexTensor.from_dict({"shape": [D * D], "data": payload["r"]})
        return cls(l=l.array, r=r.array, t=int(payload["t"]), d=int(payload["d"]),
                   chi=int(payload.get("chi", 1)), x=int(payload.get("x", 0)),
                   residual=float(payload.get("residual", 0.0)))


def _inverse(sigma: Sequence[int]) -> Tuple[int, ...]:
    inverse = [0] * len(sigma)
    for position, image in enumerate(sigma):
        inverse[image] = position
    return tuple(inverse)


@dataclass(frozen=True, eq=False)
class ReplicaPermutation:
    """
    Sheet permutations for ``m = 2n`` replicas. Sheets are ordered
    (ket_1, bra_1, ket_2, bra_2, ...), 0-based. ``pi1`` pairs ket_j with
    bra_{j+1} and ``pi2`` pairs ket_j with bra_{j-1}.
    """

    n: int
    pi1: Tuple[int, ...] = ()
    pi2: Tuple[int, ...] = ()

    def __post_init__(self):
        """Build both permutations for ``n`` replica pairs."""
        if self.n < 1:
            raise ValueError(f"Replica half-count must be positive, got {self.n}")
        sheets = 2 * self.m
        pi1 = list(range(sheets))
        pi2 = list(range(sheets))
        for j in range(self.m):
            pi1[2 * j] = 2 * ((j - 1) % self.m)
            pi2[2 * j + 1] = 2 * ((j - 1) % self.m) + 1
        object.__setattr__(self, "pi1", tuple(pi1))
        object.__setattr__(self, "pi2", tuple(pi2))

    @property
    def m(self) -> int:
        return 2 * self.n

    @property
    def sheets(self) -> int:
        return 2 * self.m

    @staticmethod
    def one_based(sigma: Sequence[int]) -> List[int]:
        return [s + 1 for s in sigma]

    @staticmethod
    def inverse(sigma: Sequence[int]) -> Tuple[int, ...]:
        return _inverse(sigma)

    @staticmethod
    def compose(outer: Sequence[int], inner: Sequence[int]) -> Tuple[int, ...]:
        """Axes of ``P_outer P_inner`` under transpose semantics."""
        return tuple(inner[outer[p]] for p in range(len(outer)))

    @staticmethod
    def apply(vector: np.ndarray, sigma: Sequence[int]) -> np.ndarray:
        """``P_sigma`` on a tensor with one axis per sheet."""
        return np.transpose(vector, list(sigma))

    def matrix(self, sigma: Sequence[int], D: int) -> np.ndarray:
        """Dense permutation matrix of ``P_sigma`` on ``(C^D)^{sheets}``."""
        dim = D ** self.sheets
        basis = np.eye(dim).reshape((dim,) + (D,) * self.sheets)
        moved = np.transpose(basis, [0] + [s + 1 for s in sigma])
        return moved.reshape(dim, dim).T


@dataclass(frozen=True, eq=False)
class MpsTransfer:
    """
    MPS transfer matrix ``tau`` (rescaled to unit leading eigenvalue) with
    the tensor rescaled to match.
    """

    tau: np.ndarray
    W: np.ndarray
    scale: float
    gap: float
    injective: bool
    r_tau: np.ndarray
    l_tau: np.ndarray
    eigenvalues: Tuple[complex, ...] = ()

    @property
    def chi(self) -> int:
        return self.W.shape[0]

    @property
    def leading_eigenvalue(self) -> complex:
        return self.eigenvalues[0] if self.eigenvalues else 1.0 + 0j

    def to_dict(self) -> Dict[str, Any]:
        return {
            "chi": self.chi,
            "scale": self.scale,
            "gap": self.gap,
            "injective": self.injective,
            "eigenvalue_moduli": [abs(v) for v in self.eigenvalues],
        }
