"""
Space-time dual pipeline: dual gates, column transfer matrices, their
fixed points and the fixed-point formulas for negativity, Renyi entropies
and replica moments.

A cell map acts on the folded column vector of shape
``(B, [ket: chi, d x (2t+1)], [bra: same])``. Ket slot 0 is the bond index,
slot ``1 + s`` is segment ``s`` of the worldline. The map is applied as
an ordered list of steps; its adjoint runs the reversed list with every
operator conjugate-transposed.
"""
import logging
from dataclasses import dataclass
from functools import reduce
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.entities.circuit import GateAssignment, InitialState, is_unitary
from src.entities.density_matrix import Partition
from src.entities.duality import (
    DualGate, FixedPointPair, MpsTransfer, ReplicaPermutation, TransferMatrix, column_dim,
)
from src.entities.exceptions import (
    FactorizationError, NonInjectiveError, SizeGuardError, SpectrumError,
)
from src.entities.tensor import noise_floor
from src.infrastructure.services.tensor_core import (
    apply_on_axes, compose, dense_matrix, eigenpair_residual, make_operator,
)
from src.interfaces.services.duality_service import DualityService
from src.interfaces.services.linear_algebra_service import LinearAlgebraService

logger = logging.getLogger(__name__)

INTERFACES = ("CA", "AB", "BC")


def reshuffle(tensor: np.ndarray) -> np.ndarray:
    """``out[i2, o2, i1, o1] = in[o1, o2, i1, i2]``; an involution."""
    return np.einsum("abcd->dbca", np.asarray(tensor, dtype=np.complex128))


def _dagger(op: np.ndarray) -> np.ndarray:
    k = op.ndim // 2
    return np.conj(np.transpose(op, list(range(k, 2 * k)) + list(range(k))))


@dataclass(frozen=True)
class _Step:
    """One operator of a cell map. ``joint`` steps act on ket and bra at once."""

    op: np.ndarray
    axes: Tuple[int, ...]
    joint: bool = False


class _CellMap:
    """Ordered steps of one cell acting on batches of folded column vectors."""

    def __init__(self, t: int, d: int, chi: int, steps: List[_Step]):
        self.block = (chi,) + (d,) * (2 * t + 1)
        self.nk = len(self.block)
        self.dim = column_dim(t, d, chi) ** 2
        self.steps = steps

    def _run(self, batch: np.ndarray, steps: Sequence[_Step], adjoint: bool) -> np.ndarray:
        count = batch.shape[0]
        tensor = batch.reshape((count,) + self.block + self.block)
        for step in steps:
            op = _dagger(step.op) if adjoint else step.op
            if step.joint:
                tensor = apply_on_axes(tensor, op, list(step.axes))
                continue
            tensor = apply_on_axes(tensor, op, [1 + a for a in step.axes])
            tensor = apply_on_axes(tensor, np.conj(op), [1 + self.nk + a for a in step.axes])
        return tensor.reshape(count, self.dim)

    def forward(self, batch: np.ndarray) -> np.ndarray:
        return self._run(batch, self.steps, adjoint=False)

    def adjoint(self, batch: np.ndarray) -> np.ndarray:
        return self._run(batch, list(reversed(self.steps)), adjoint=True)


class SpacetimeDualityUseCase(DualityService):
    """Column transfer matrices and the formulas evaluated on their fixed points."""

    def __init__(
        self,
        linear_algebra: LinearAlgebraService,
        dense_limit: int = 4096,
        rank_tol: float = 1e-6,
        normalization_tol: float = 1e-8,
        replica_limit: int = 65536,
        trace_batch: int = 256,
        probe_seed: int = 7,
        clip_relative: float = 1e-10,
        noise_factor: float = 10.0,
    ):
        """
        Initialize the dual pipeline.

        Args:
            linear_algebra: Power iteration and fractional traces
            dense_limit: Largest transfer dimension materialized as a matrix
            rank_tol: Allowed relative weight beyond the leading singular value
            normalization_tol: Allowed deviation of tr[M_l^dagger M_r] from 1
            replica_limit: Largest replica space materialized explicitly
            trace_batch: Basis vectors pushed through the replica ring at once
            probe_seed: Seed of the random probes of the matrix-free route
            clip_relative: Negative-eigenvalue clip of M_r relative to its largest |lambda|
            noise_factor: Multiplier of the eps * dim * max|lambda| floor for M_r
        """
        self.linear_algebra = linear_algebra
        self.dense_limit = dense_limit
        self.rank_tol = rank_tol
        self.normalization_tol = normalization_tol
        self.replica_limit = replica_limit
        self.trace_batch = trace_batch
        self.probe_seed = probe_seed
        self.clip_relative = clip_relative
        self.noise_factor = noise_factor

    # Dual gates and transfer matrices

    def dual_gate(self, gate: np.ndarray) -> DualGate:
        gate = np.asarray(gate, dtype=np.complex128)
        if gate.ndim != 2 or gate.shape[0] != gate.shape[1]:
            raise ValueError(f"Expected a square gate matrix, got shape {gate.shape}")
        d = int(round(np.sqrt(gate.shape[0])))
        if d * d != gate.shape[0]:
            raise ValueError(f"Gate dimension {gate.shape[0]} is not a square d^2")
        if not is_unitary(gate):
            raise ValueError("Gate is not unitary")
        return DualGate(tensor=reshuffle(gate.reshape(d, d, d, d)))

    def _cell_steps(self, t: int, odd_gates: Sequence[np.ndarray],
                    even_gates: Sequence[np.ndarray], W: np.ndarray, d: int) -> List[_Step]:
        nk = 2 * t + 2
        eye = np.eye(d, dtype=np.complex128)
        top = 1 + 2 * t
        # Trace site 2k's top output, open site 2k+1's top output.
        steps = [_Step(op=np.einsum("ab,cd->abcd", eye, eye), axes=(1 + top, 1 + nk + top),
                       joint=True)]
        first = np.asarray(odd_gates[0]).reshape(d, d, d, d)
        # Initial tensor and first odd gate share (i, j): elementwise, no sum.
        steps.append(_Step(op=np.einsum("mnij,opij->njpmio", W, first), axes=(0, 1, 2)))
        for tau in range(2, t + 1):
            dual = reshuffle(np.asarray(odd_gates[tau - 1]).reshape(d, d, d, d))
            steps.append(_Step(op=dual, axes=(2 * tau - 1, 2 * tau)))
        for tau in range(1, t + 1):
            dual = reshuffle(np.asarray(even_gates[tau - 1]).reshape(d, d, d, d))
            steps.append(_Step(op=dual, axes=(2 * tau, 2 * tau + 1)))
        steps.append(_Step(op=np.ones((d, d), dtype=np.complex128), axes=(1,)))
        return steps

    def build_transfer(
        self, t: int, odd_gates: Sequence[np.ndarray], even_gates: Sequence[np.ndarray],
        W: np.ndarray, d: int, chi: int = 1, cell: int = 0,
    ) -> TransferMatrix:
        if t < 1:
            raise ValueError(f"Transfer matrices need t >= 1, got {t}")
        if len(odd_gates) < t or len(even_gates) < t:
            raise ValueError(f"Need {t} odd and even gates, got {len(odd_gates)}/{len(even_gates)}")
        W = np.asarray(W, dtype=np.complex128)
        if W.shape != (chi, chi, d, d):
            raise ValueError(f"Cell tensor has shape {W.shape}, expected {(chi, chi, d, d)}")
        for gate in list(odd_gates[:t]) + list(even_gates[:t]):
            if np.shape(gate) != (d * d, d * d):
                raise ValueError(f"Gate has shape {np.shape(gate)}, expected {(d * d, d * d)}")

        cell_map = _CellMap(t, d, chi, self._cell_steps(t, odd_gates, even_gates, W, d))
        operator = make_operator(cell_map.dim, cell_map.forward, cell_map.adjoint)
        matrix = None
        if cell_map.dim <= self.dense_limit:
            matrix = dense_matrix(operator, self.dense_limit)
            operator = make_operator(cell_map.dim, lambda b: b @ matrix.T,
                                     lambda b: b @ matrix.conj())
        logger.debug(f"Built transfer matrix for cell {cell}: t={t}, dim={cell_map.dim}, "
                     f"dense={matrix is not None}")
        return TransferMatrix(t=t, d=d, chi=chi, operator=operator,
                              provenance={"cell": cell, "steps": len(cell_map.steps)},
                              matrix=matrix)

    def column_transfers(self, gates: GateAssignment, init: InitialState,
                         t: int) -> List[TransferMatrix]:
        """One transfer matrix per cell; a homogeneous circuit shares a single one."""
        lattice = gates.lattice
        init.check_lattice(lattice)
        d, chi = lattice.d, init.chi

        def cell_tensor(cell: int) -> np.ndarray:
            W = init.cell_tensor(cell)
            return self.mps_transfer(W).W if init.kind == "mps" else W

        if gates.is_homogeneous and init.is_translation_invariant:
            odd, even = gates.column_gates(0, t)
            shared = self.build_transfer(t, odd, even, cell_tensor(0), d, chi, cell=0)
            shared.provenance["homogeneous"] = True
            return [shared] * lattice.L
        transfers = []
        for cell in range(lattice.L):
            odd, even = gates.column_gates(cell, t)
            transfers.append(self.build_transfer(t, odd, even, cell_tensor(cell), d, chi, cell))
        return transfers

    # Fixed points

    @staticmethod
    def _dense(transfer: TransferMatrix, limit: int) -> np.ndarray:
        if transfer.matrix is not None:
            return transfer.matrix
        return dense_matrix(transfer.operator, limit)

    def _product(self, transfers: Sequence[TransferMatrix], cells: Sequence[int]) -> np.ndarray:
        dim = transfers[0].dim
        if dim > self.dense_limit:
            raise SizeGuardError(f"Transfer dimension {dim} exceeds dense limit {self.dense_limit}")
        product = np.eye(dim, dtype=np.complex128)
        for cell in cells:
            product = self._dense(transfers[cell], self.dense_limit) @ product
        return product

    def _normalize(self, l: np.ndarray, r: np.ndarray, t: int, d: int, chi: int, x: int,
                   residual: float) -> FixedPointPair:
        D = column_dim(t, d, chi)
        trace = np.trace(r.reshape(D, D))
        if abs(trace) > 1e-14:
            r = r / trace
        else:
            logger.warning(f"tr M_r vanishes at x={x}; fixing the phase by the largest entry")
            r = r / r[int(np.argmax(np.abs(r)))]
        overlap = np.vdot(l, r)
        if abs(overlap) < 1e-14:
            raise FactorizationError(f"Left and right fixed points at x={x} are orthogonal")
        return FixedPointPair(l=l / np.conj(overlap), r=r, t=t, d=d, chi=chi, x=x,
                              residual=residual)

    def _svd_factor(self, product: np.ndarray, side: str, x: int) -> Tuple[np.ndarray, float]:
        u, s, vh = np.linalg.svd(product)
        residual = float(np.sqrt(np.sum(s[1:] ** 2)))
        relative = residual / s[0] if s[0] > 0 else np.inf
        if relative > self.rank_tol:
            raise FactorizationError(
                f"Transfer product at x={x} ({side}) is not rank one: "
                f"relative residual {relative:.3e}"
            )
        return (u[:, 0] if side == "right" else vh[0].conj()), residual

    def _probe(self, operator, dim: int, seed_offset: int) -> Tuple[np.ndarray, float]:
        rng = np.random.default_rng(self.probe_seed + seed_offset)
        probes = rng.standard_normal((dim, 2)) + 1j * rng.standard_normal((dim, 2))
        images = operator(probes)
        first, second = images[:, 0], images[:, 1]
        projected = second - np.vdot(first, second) / np.vdot(first, first) * first
        residual = float(np.linalg.norm(projected) / max(np.linalg.norm(second), 1e-300))
        if residual > self.rank_tol:
            raise FactorizationError(f"Probe images are not parallel: residual {residual:.3e}")
        return first, residual

    @staticmethod
    def _is_shared(transfers: Sequence[TransferMatrix]) -> bool:
        return all(tr is transfers[0] for tr in transfers)

    def fixed_points(
        self, transfers: Sequence[TransferMatrix], x: int, method: str = "matrix_power",
    ) -> FixedPointPair:
        if not transfers:
            raise ValueError("Need at least one transfer matrix")
        L = len(transfers)
        first = transfers[0]
        t, d, chi = first.t, first.d, first.chi

        if method == "power":
            if self._is_shared(transfers):
                operator = first.operator
            else:
                operator = compose([transfers[(x + i) % L].operator for i in range(L)])
            mu, r, l = self.linear_algebra.leading_pair(operator)
            if abs(mu - 1.0) > 1e-9:
                logger.warning(f"Leading transfer eigenvalue {mu:.12g} differs from 1")
            residual = eigenpair_residual(operator, 1.0, r, l)
            return self._normalize(l, r, t, d, chi, x, residual)
        if method != "matrix_power":
            raise ValueError(f"Unknown fixed-point method '{method}'")

        left_cells = [(x - 2 * t + i) % L for i in range(2 * t)]
        right_cells = [(x + i) % L for i in range(2 * t)]
        if first.dim <= self.dense_limit:
            r, res_r = self._svd_factor(self._product(transfers, left_cells), "right", x)
            l, res_l = self._svd_factor(self._product(transfers, right_cells), "left", x)
        else:
            logger.info(f"Transfer dimension {first.dim} above dense limit; using probes")
            left = compose([transfers[c].operator for c in left_cells])
            right = compose([transfers[c].operator for c in right_cells])
            r, res_r = self._probe(left.matmat, first.dim, 0)
            l, res_l = self._probe(right.rmatmat, first.dim, 1)
        return self._normalize(l, r, t, d, chi, x, max(res_r, res_l))

    def interface_pairs(self, transfers: Sequence[TransferMatrix], partition: Partition,
                        method: str = "matrix_power") -> Dict[str, FixedPointPair]:
        """Fixed points at x_CA, x_AB and x_BC; shared transfers reuse one pair."""
        partition.check_lattice(len(transfers))
        positions = {"CA": partition.x_CA, "AB": partition.x_AB, "BC": partition.x_BC}
        if self._is_shared(transfers):
            pair = self.fixed_points(transfers, partition.x_AB, method)
            return {name: pair for name in INTERFACES}
        return {name: self.fixed_points(transfers, x, method) for name, x in positions.items()}

    def fixed_point_operators(self, pair: FixedPointPair) -> Tuple[np.ndarray, np.ndarray]:
        return pair.M_l, pair.M_r

    # Fixed-point formulas

    def _balanced(self, M_l: np.ndarray, M_r: np.ndarray) -> np.ndarray:
        """``M_r^(1/2) M_l^dagger M_r^(1/2)``, isospectral to M_l^dagger M_r."""
        M_l = np.asarray(M_l, dtype=np.complex128)
        M_r = np.asarray(M_r, dtype=np.complex128)
        overlap = np.trace(M_l.conj().T @ M_r)
        if abs(overlap - 1.0) > self.normalization_tol:
            raise ValueError(f"Fixed points are not normalised: tr[M_l^dagger M_r] = {overlap:.6g}")
        values, vectors = np.linalg.eigh((M_r + M_r.conj().T) / 2)
        floor = self.clip_relative * max(float(np.max(np.abs(values))), 0.0)
        if values.min() < -floor:
            raise SpectrumError(f"M_r has eigenvalue {values.min():.3e} below the clip threshold")
        values = np.where(values > noise_floor(values, self.noise_factor), values, 0.0)
        root = (vectors * np.sqrt(values)) @ vectors.conj().T
        Y = root @ M_l.conj().T @ root
        anti = float(np.linalg.norm(Y - Y.conj().T)) / 2
        logger.debug(f"Balanced fixed-point product: anti-Hermitian norm {anti:.3e}")
        return Y

    def x_trace(self, M_l: np.ndarray, M_r: np.ndarray, alpha: float) -> float:
        """``tr[(M_l^dagger M_r)^alpha]`` through the Hermitian balanced form."""
        return self.linear_algebra.frac_power_trace(self._balanced(M_l, M_r), alpha)

    def dual_negativity(self, M_l: np.ndarray, M_r: np.ndarray) -> float:
        return 2.0 * float(np.log(self.x_trace(M_l, M_r, 0.5)))

    def dual_renyi(self, M_l: np.ndarray, M_r: np.ndarray, n: float) -> float:
        if n <= 0 or n == 1:
            raise ValueError(f"Renyi index must be positive and different from 1, got {n}")
        return 2.0 / (1.0 - n) * float(np.log(self.x_trace(M_l, M_r, n)))

    def dual_mutual_information(self, M_l: np.ndarray, M_r: np.ndarray, n: float) -> float:
        """Homogeneous Renyi mutual information; equals :meth:`dual_renyi`."""
        return self.dual_renyi(M_l, M_r, n)

    def replica_element(self, M_l: np.ndarray, M_r: np.ndarray,
                        sigma: Sequence[int]) -> complex:
        """``<l^(x)m| P_sigma |r^(x)m>`` for ``m = len(sigma) / 2`` copies."""
        sheets = len(sigma)
        copies = sheets // 2
        D = M_r.shape[0]
        if D ** sheets <= self.replica_limit:
            r_m = reduce(np.multiply.outer, [M_r] * copies)
            l_m = reduce(np.multiply.outer, [M_l] * copies)
            return complex(np.vdot(l_m, np.transpose(r_m, list(sigma))))
        inverse = ReplicaPermutation.inverse(sigma)
        operands: List[object] = []
        for j in range(copies):
            operands += [np.conj(M_l), [2 * j, 2 * j + 1]]
            operands += [M_r, [inverse[2 * j], inverse[2 * j + 1]]]
        return complex(np.einsum(*operands, [], optimize=True))

    def _moments(self, matrices: Mapping[str, Tuple[np.ndarray, np.ndarray]],
                 n: int) -> Dict[str, float]:
        if n < 1:
            raise ValueError(f"Moment index must be a positive integer, got {n}")
        closed = (np.log(self.x_trace(*matrices["CA"], 2 * n))
                  + np.log(self.x_trace(*matrices["BC"], 2 * n))
                  + 2.0 * np.log(self.x_trace(*matrices["AB"], n)))
        perms = ReplicaPermutation(n)
        elements = {
            "CA": self.replica_element(*matrices["CA"], perms.pi1),
            "AB": self.replica_element(
                *matrices["AB"], perms.compose(perms.pi2, perms.inverse(perms.pi1))),
            "BC": self.replica_element(*matrices["BC"], perms.inverse(perms.pi2)),
        }
        product = elements["CA"] * elements["AB"] * elements["BC"]
        if abs(product.imag) > 1e-8 * max(1.0, abs(product)):
            logger.warning(f"Replica element product has imaginary part {product.imag:.3e}")
        return {"closed_form": float(closed), "replica_elements": float(np.log(product.real))}

    def dual_moments(self, M_l: np.ndarray, M_r: np.ndarray, n: int) -> Dict[str, float]:
        return self._moments({name: (M_l, M_r) for name in INTERFACES}, n)

    def dual_moments_resolved(self, pairs: Mapping[str, FixedPointPair],
                              n: int) -> Dict[str, float]:
        """E_2n from separate fixed points at the three interfaces."""
        return self._moments({name: (pairs[name].M_l, pairs[name].M_r) for name in INTERFACES}, n)

    def replica_identity_check(self, pair: FixedPointPair, n: int) -> List[float]:
        perms = ReplicaPermutation(n)
        X = pair.X
        trace_m = complex(np.trace(np.linalg.matrix_power(X, 2 * n)))
        trace_n = complex(np.trace(np.linalg.matrix_power(X, n)))
        M_l, M_r = pair.M_l, pair.M_r
        checks = [
            (perms.inverse(perms.pi1), trace_m),
            (perms.pi2, trace_m),
            (perms.compose(perms.pi1, perms.inverse(perms.pi2)), trace_n ** 2),
        ]
        residuals = [abs(self.replica_element(M_l, M_r, sigma) - expected)
                     for sigma, expected in checks]
        logger.debug(f"Replica identities (n={n}): residuals {residuals}")
        return [float(r) for r in residuals]

    def dual_subsystem_entropies(
        self, pairs: Mapping[str, FixedPointPair], n: float
    ) -> Tuple[float, float, float]:
        if n <= 0 or n == 1:
            raise ValueError(f"Renyi index must be positive and different from 1, got {n}")
        logs = {name: float(np.log(self.x_trace(pairs[name].M_l, pairs[name].M_r, n)))
                for name in INTERFACES}
        S_A = (logs["CA"] + logs["AB"]) / (1.0 - n)
        S_B = (logs["AB"] + logs["BC"]) / (1.0 - n)
        S_AB = (logs["CA"] + logs["BC"]) / (1.0 - n)
        return S_A, S_B, S_AB

    def dual_ratio(self, pair: FixedPointPair, alpha: float) -> float:
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        return 2.0 * float(np.log(self.x_trace(pair.M_l, pair.M_r, alpha / 2.0)))

    def measure(self, pairs: Mapping[str, FixedPointPair], alphas: Sequence[float],
                moments: Sequence[int]) -> Dict[str, object]:
        """Every dual quantity of one circuit, keyed like the oracle's result."""
        AB = pairs["AB"]
        S_A, S_B, S_AB = self.dual_subsystem_entropies(pairs, 0.5)
        S2_A, S2_B, S2_AB = self.dual_subsystem_entropies(pairs, 2.0)
        return {
            "S_half_A": S_A,
            "S_half_B": S_B,
            "I_half": S_A + S_B - S_AB,
            "I_2": S2_A + S2_B - S2_AB,
            "E": self.dual_negativity(AB.M_l, AB.M_r),
            "moments": {n: self.dual_moments_resolved(pairs, n) for n in moments},
            "R_alpha": {a: self.dual_ratio(AB, a) for a in alphas},
        }

    # Checks and MPS data

    def factorization_check(
        self, transfers: Sequence[TransferMatrix], t: int, x: int = 0,
        length: Optional[int] = None, method: str = "matrix_power",
        gap: Optional[float] = None,
    ) -> Tuple[float, Optional[float]]:
        """
        Distance of ``T_{y-1} ... T_x`` from ``|r^(y)><l^(x)|`` built from the
        extracted fixed points, with ``y = x + length``.

        Returns:
            Frobenius residual and, when the MPS ``gap`` is given, the
            predicted scale ``gap ** (length - 2t - 1)``
        """
        if not transfers:
            raise ValueError("Need at least one transfer matrix")
        L = len(transfers)
        length = L if length is None else length
        if length < 2 * t:
            logger.warning(f"Product of {length} transfers is shorter than 2t={2 * t}")
        product = self._product(transfers, [(x + i) % L for i in range(length)])
        left = self.fixed_points(transfers, x, method)
        y = (x + length) % L
        right = left if y == x % L or self._is_shared(transfers) \
            else self.fixed_points(transfers, y, method)
        scale = np.vdot(right.l, product @ left.r)
        residual = float(np.linalg.norm(product - scale * np.outer(right.r, left.l.conj())))
        predicted = None if gap is None else float(gap ** (length - 2 * t - 1))
        logger.debug(f"factorization_check: x={x} length={length} residual {residual:.3e}")
        return residual, predicted

    def mps_transfer(self, W: np.ndarray, require_injective: bool = False) -> MpsTransfer:
        W = np.asarray(W, dtype=np.complex128)
        if W.ndim != 4 or W.shape[0] != W.shape[1]:
            raise ValueError(f"MPS tensors have shape (chi, chi, d, d), got {W.shape}")
        chi = W.shape[0]
        tau = np.einsum("acst,bdst->abcd", W, W.conj()).reshape(chi * chi, chi * chi)
        values, right = np.linalg.eig(tau)
        order = np.argsort(-np.abs(values))
        values = values[order]
        lead = values[0]
        if abs(lead) < 1e-300:
            raise ValueError("MPS transfer matrix is nilpotent")
        scale = float(abs(lead))
        gap = float(abs(values[1]) / scale) if len(values) > 1 else 0.0
        injective = gap < 1.0 - 1e-10
        if not injective:
            message = f"Leading MPS transfer eigenvalue is degenerate (gap ratio {gap:.6g})"
            if require_injective:
                raise NonInjectiveError(message)
            logger.warning(message)
        r_tau = right[:, order[0]]
        left_values, left = np.linalg.eig(tau.conj().T)
        l_tau = left[:, int(np.argmin(np.abs(left_values - np.conj(lead))))]
        overlap = np.vdot(l_tau, r_tau)
        if abs(overlap) > 1e-14:
            l_tau = l_tau / np.conj(overlap)
        return MpsTransfer(tau=tau / lead, W=W / np.sqrt(scale), scale=scale, gap=gap,
                           injective=injective, r_tau=r_tau, l_tau=l_tau,
                           eigenvalues=tuple(complex(v / scale) for v in values))

    def replica_trace(self, transfers: Sequence[TransferMatrix], partition: Partition,
                      n: int) -> float:
        if n < 1:
            raise ValueError(f"Replica index must be a positive integer, got {n}")
        L = len(transfers)
        partition.check_lattice(L)
        perms = ReplicaPermutation(n)
        m, sheets = perms.m, perms.sheets
        D = transfers[0].column_dim
        dim = D ** sheets
        if dim > self.replica_limit:
            raise SizeGuardError(f"Replica space of dimension {dim} exceeds {self.replica_limit}")

        order = [(partition.x_CA + i) % L for i in range(L)]
        regions = ["A"] * partition.L_A + ["B"] * partition.L_B + ["C"] * partition.L_C
        pairing = {"A": perms.pi1, "B": perms.pi2}
        cells = [self._dense(transfers[c], self.dense_limit).reshape(D, D, D, D) for c in order]

        def permute(batch, sigma):
            return np.transpose(batch, [0] + [1 + s for s in sigma])

        def ring(batch):
            active = None
            for tensor, region in zip(cells, regions):
                sigma = pairing.get(region)
                if sigma != active:
                    if active is not None:
                        batch = permute(batch, perms.inverse(active))
                    if sigma is not None:
                        batch = permute(batch, sigma)
                    active = sigma
                for j in range(m):
                    batch = apply_on_axes(batch, tensor, [1 + 2 * j, 2 + 2 * j])
            if active is not None:
                batch = permute(batch, perms.inverse(active))
            return batch

        total = 0j
        for start in range(0, dim, self.trace_batch):
            index = np.arange(start, min(dim, start + self.trace_batch))
            basis = np.zeros((index.size, dim), dtype=np.complex128)
            basis[np.arange(index.size), index] = 1.0
            image = ring(basis.reshape((index.size,) + (D,) * sheets)).reshape(index.size, dim)
            total += image[np.arange(index.size), index].sum()
        norm = np.trace(self._product(transfers, order))
        logger.debug(f"Replica ring trace {total:.12g}, single-copy norm {norm:.12g}")
        if total.real <= 0 or norm.real <= 0:
            raise SpectrumError(f"Replica ring trace {total:.6g} is not positive")
        return float(np.log(total.real) - m * np.log(norm.real))
