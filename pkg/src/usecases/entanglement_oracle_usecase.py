"""
Brute-force entanglement oracle on dense reduced density matrices.
"""
import logging
from typing import Dict, Iterable, List, Optional

import numpy as np

from src.entities.circuit import PureState
from src.entities.density_matrix import DensityMatrix, NegativitySpectrum, Partition
from src.entities.exceptions import PurityError, SizeGuardError
from src.entities.tensor import ComplexTensor, noise_floor
from src.interfaces.services.entanglement_service import EntanglementService
from src.interfaces.services.linear_algebra_service import LinearAlgebraService

logger = logging.getLogger(__name__)


class EntanglementOracleUseCase(EntanglementService):
    """Reduced states, partial transposes and their spectral measures."""

    def __init__(
        self,
        linear_algebra: LinearAlgebraService,
        max_dense_sites: int = 12,
        noise_factor: float = 10.0,
        purity_tol: float = 1e-9,
    ):
        """
        Initialize the oracle.

        Args:
            linear_algebra: Hermitian eigensolver
            max_dense_sites: Largest number of retained sites
            noise_factor: Multiplier of the eps * dim * max|lambda| eigenvalue floor
            purity_tol: Allowed mismatch of S_AB computed from rho_AB and rho_C
        """
        self.linear_algebra = linear_algebra
        self.max_dense_sites = max_dense_sites
        self.noise_factor = noise_factor
        self.purity_tol = purity_tol

    def reduce(self, state: PureState, keep: Iterable[int]) -> DensityMatrix:
        lattice = state.lattice
        keep = sorted({int(s) % lattice.n_sites for s in keep})
        if not keep:
            raise ValueError("Cannot reduce onto an empty set of sites")
        if len(keep) > self.max_dense_sites:
            raise SizeGuardError(
                f"Reduced state on {len(keep)} sites exceeds the guard of {self.max_dense_sites}"
            )
        traced = [s for s in range(lattice.n_sites) if s not in keep]
        psi = state.amplitudes
        rho = np.tensordot(psi, psi.conj(), axes=(traced, traced))
        dim = lattice.d ** len(keep)
        return DensityMatrix(matrix=rho.reshape(dim, dim), sites=tuple(keep), d=lattice.d)

    def partial_transpose(self, rho: DensityMatrix, A: Iterable[int]) -> ComplexTensor:
        positions = rho.positions(list(A))
        m = rho.n_sites
        axes = list(range(2 * m))
        for p in positions:
            axes[p], axes[m + p] = m + p, p
        transposed = np.transpose(rho.tensor(), axes).reshape(rho.dim, rho.dim)
        return ComplexTensor.from_array(transposed)

    def _pt_eigenvalues(self, rho: DensityMatrix, A: Iterable[int]) -> np.ndarray:
        values, _ = self.linear_algebra.hermitian_eigs(self.partial_transpose(rho, A))
        return values

    def _eigenvalues(self, rho: DensityMatrix) -> np.ndarray:
        values, _ = self.linear_algebra.hermitian_eigs(rho.matrix)
        return values

    def negativity_spectrum(self, rho: DensityMatrix, A: Iterable[int]) -> NegativitySpectrum:
        return NegativitySpectrum(eigenvalues=tuple(self._pt_eigenvalues(rho, A)))

    def log_negativity(self, rho: DensityMatrix, A: Iterable[int]) -> float:
        return float(np.log(np.sum(np.abs(self._pt_eigenvalues(rho, A)))))

    def negativity_moments(self, rho: DensityMatrix, A: Iterable[int], n: int) -> float:
        if n < 1:
            raise ValueError(f"Moment index must be a positive integer, got {n}")
        values = self._pt_eigenvalues(rho, A)
        return float(np.log(np.sum(values ** (2 * n))))

    def _abs_power_sum(self, values: np.ndarray, alpha: float) -> float:
        kept = np.abs(values)
        kept = kept[kept > noise_floor(values, self.noise_factor)]
        return float(np.sum(kept ** alpha))

    def negativity_alpha(self, rho: DensityMatrix, A: Iterable[int], alpha: float) -> float:
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        return float(np.log(self._abs_power_sum(self._pt_eigenvalues(rho, A), alpha)))

    def _entropy_from_values(self, values: np.ndarray, alpha: float) -> float:
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        kept = values[values > noise_floor(values, self.noise_factor)]
        if alpha == 1:
            return float(-np.sum(kept * np.log(kept)))
        return float(np.log(np.sum(kept ** alpha)) / (1 - alpha))

    def renyi_entropy(self, rho: DensityMatrix, alpha: float) -> float:
        return self._entropy_from_values(self._eigenvalues(rho), alpha)

    def region_entropy(self, state: PureState, sites: List[int], alpha: float) -> float:
        """Entropy of a region, read off the smaller side of the bipartition."""
        n_sites = state.lattice.n_sites
        if not sites or len(sites) == n_sites:
            return 0.0
        complement = [s for s in range(n_sites) if s not in sites]
        smaller = sites if len(sites) <= len(complement) else complement
        return self.renyi_entropy(self.reduce(state, smaller), alpha)

    def entropies(self, state: PureState, partition: Partition,
                  alpha: float) -> Dict[str, float]:
        """S_A, S_B and S_AB of a pure state."""
        partition.check_lattice(state.lattice.L)
        sites_A = partition.region_sites("A")
        sites_B = partition.region_sites("B")
        sites_C = partition.region_sites("C")
        S_A = self.region_entropy(state, sites_A, alpha)
        S_B = self.region_entropy(state, sites_B, alpha)
        S_AB = self.region_entropy(state, sites_C, alpha)
        if sites_C and len(sites_A) + len(sites_B) <= self.max_dense_sites \
                and len(sites_C) < len(sites_A) + len(sites_B):
            direct = self.renyi_entropy(self.reduce(state, sites_A + sites_B), alpha)
            if abs(direct - S_AB) > self.purity_tol:
                raise PurityError(
                    f"S_AB from rho_AB ({direct:.12g}) and rho_C ({S_AB:.12g}) disagree"
                )
        return {"S_A": S_A, "S_B": S_B, "S_AB": S_AB}

    def mutual_information(self, state: PureState, partition: Partition, alpha: float) -> float:
        entropies = self.entropies(state, partition, alpha)
        return entropies["S_A"] + entropies["S_B"] - entropies["S_AB"]

    def ratio_R(self, rho: DensityMatrix, A: Iterable[int], alpha: float) -> float:
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        numerator = self._abs_power_sum(self._pt_eigenvalues(rho, A), alpha)
        denominator = self._abs_power_sum(np.clip(self._eigenvalues(rho), 0.0, None), alpha)
        return float(np.log(numerator / denominator))

    def measure(self, state: PureState, partition: Partition, alphas: List[float],
                moments: List[int], rho_AB: Optional[DensityMatrix] = None) -> Dict[str, object]:
        """
        Every oracle quantity of one state; negativity-type entries are
        ``None`` when rho_AB exceeds the size guard.
        """
        sites_A = partition.region_sites("A")
        half = self.entropies(state, partition, 0.5)
        result: Dict[str, object] = {
            "S_half_A": half["S_A"],
            "S_half_B": half["S_B"],
            "I_half": half["S_A"] + half["S_B"] - half["S_AB"],
            "I_2": self.mutual_information(state, partition, 2.0),
            "E": None, "moments": {}, "R_alpha": {},
        }
        if rho_AB is None:
            sites_AB = partition.region_sites("AB")
            if len(sites_AB) > self.max_dense_sites:
                logger.warning(f"rho_AB on {len(sites_AB)} sites skipped: size")
                return result
            rho_AB = self.reduce(state, sites_AB)
        result["E"] = self.log_negativity(rho_AB, sites_A)
        result["moments"] = {n: self.negativity_moments(rho_AB, sites_A, n) for n in moments}
        result["R_alpha"] = {a: self.ratio_R(rho_AB, sites_A, a) for a in alphas}
        return result
