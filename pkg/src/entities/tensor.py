"""
Entity representing a dense complex tensor with explicit shape metadata.
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

EPS = float(np.finfo(np.float64).eps)


def noise_floor(values: np.ndarray, factor: float = 1.0) -> float:
    """
    Magnitude below which an eigenvalue of a ``len(values)``-dimensional
    Hermitian matrix is rounding noise: ``factor * eps * dim * max|lambda|``.
    """
    values = np.asarray(values)
    if values.size == 0:
        return 0.0
    return factor * EPS * values.size * float(np.max(np.abs(values)))


@dataclass(frozen=True, eq=False)
class ComplexTensor:
    """
    Row-major complex tensor.

    The flat ``data`` buffer is read-only, so instances can be shared
    between worker threads.
    """

    shape: Tuple[int, ...]
    data: np.ndarray

    def __post_init__(self):
        """Validate the shape against the buffer."""
        shape = tuple(int(s) for s in self.shape)
        if any(s <= 0 for s in shape):
            raise ValueError(f"Extents must be positive, got {shape}")
        data = np.array(self.data, dtype=np.complex128).reshape(-1)
        if data.size != int(np.prod(shape)):
            raise ValueError(
                f"Shape {shape} needs {int(np.prod(shape))} entries, got {data.size}"
            )
        data.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, array: Any) -> "ComplexTensor":
        """Wrap a numpy array (copied, row-major)."""
        array = np.asarray(array, dtype=np.complex128)
        return cls(shape=array.shape, data=array)

    @property
    def array(self) -> np.ndarray:
        """Read-only view with the tensor shape."""
        return self.data.reshape(self.shape)

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def is_square_matrix(self) -> bool:
        return len(self.shape) == 2 and self.shape[0] == self.shape[1]

    def reshape(self, shape: Sequence[int]) -> "ComplexTensor":
        """Return the same buffer under a new shape."""
        return ComplexTensor(shape=tuple(shape), data=self.data)

    def permute(self, axes: Sequence[int]) -> "ComplexTensor":
        """Permute tensor indices (numpy ``transpose`` semantics)."""
        if sorted(axes) != list(range(len(self.shape))):
            raise ValueError(f"{list(axes)} is not a permutation of the axes")
        return ComplexTensor.from_array(np.transpose(self.array, axes))

    def to_dict(self) -> Dict[str, Any]:
        """Serialize as ``{"shape": [...], "data": [[re, im], ...]}``."""
        return {
            "shape": list(self.shape),
            "data": [[float(z.real), float(z.imag)] for z in self.data],
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ComplexTensor":
        """Inverse of :meth:`to_dict`."""
        entries: List[Sequence[float]] = payload["data"]
        data = np.array([complex(re, im) for re, im in entries], dtype=np.complex128)
        return cls(shape=tuple(payload["shape"]), data=data)
