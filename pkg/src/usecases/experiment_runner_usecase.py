"""
Experiment harness: sweeps (t, seed) points through the oracle, dual and
Clifford pipelines and turns the results into rows and a verdict.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.stats import linregress
from tqdm import tqdm

from src.entities.circuit import LatticeSpec
from src.entities.density_matrix import Partition
from src.entities.exceptions import BrickdualError, SizeGuardError
from src.entities.experiment import (
    ExperimentConfig, PartitionConfig, ResultRow, RunSummary, ScanRow, alpha_key,
)
from src.entities.stabilizer import StabilizerTableau
from src.interfaces.repositories.circuit_repository import CircuitRepository
from src.usecases.circuit_evolution_usecase import CircuitEvolutionUseCase
from src.usecases.clifford_stabilizer_usecase import CliffordStabilizerUseCase
from src.usecases.entanglement_oracle_usecase import EntanglementOracleUseCase
from src.usecases.spacetime_duality_usecase import INTERFACES, SpacetimeDualityUseCase

logger = logging.getLogger(__name__)
events = structlog.get_logger(__name__)

CLIFFORD_EXTRAS = ["s_A", "s_B", "s_C", "e_AB", "e_BC", "e_CA", "g_ABC"]
RATIO_ZERO_TOL = 1e-10


def to_partition(config: PartitionConfig) -> Partition:
    return Partition(L_A=config.L_A, L_B=config.L_B, L_C=config.L_C, offset=config.offset)


def _abs_diff(a: Optional[float], b: Optional[float]) -> Optional[float]:
    if a is None or b is None:
        return None
    return abs(a - b)


class ExperimentRunnerUseCase:
    """Runs sweeps and scans and checks the early-time relations on the results."""

    def __init__(
        self,
        circuit: CircuitEvolutionUseCase,
        oracle: EntanglementOracleUseCase,
        duality: SpacetimeDualityUseCase,
        stabilizer: CliffordStabilizerUseCase,
        circuit_repository: Optional[CircuitRepository] = None,
        relation_tol: float = 1e-9,
        pipeline_tol: float = 1e-8,
        breakdown_threshold: float = 1e-3,
        threads: int = 1,
        progress: bool = True,
    ):
        """
        Initialize the harness.

        Args:
            circuit: Gate families, initial states and state-vector evolution
            oracle: Brute-force entanglement measures
            duality: Space-time dual pipeline
            stabilizer: Clifford tableau engine
            circuit_repository: Destination of fixed-point snapshots
            relation_tol: Tolerance of oracle-only relation checks
            pipeline_tol: Tolerance of cross-pipeline checks
            breakdown_threshold: Residual counted as a breakdown outside the regime
            threads: Default worker count
            progress: Show a progress bar on a terminal
        """
        self.circuit = circuit
        self.oracle = oracle
        self.duality = duality
        self.stabilizer = stabilizer
        self.circuit_repository = circuit_repository
        self.relation_tol = relation_tol
        self.pipeline_tol = pipeline_tol
        self.breakdown_threshold = breakdown_threshold
        self.threads = threads
        self.progress = progress

    # Sweeps

    @staticmethod
    def extra_columns(config: ExperimentConfig, pipelines: Sequence[str]) -> List[str]:
        """Extra CSV columns produced by the given pipelines."""
        extras = []
        if "oracle" in pipelines:
            extras += ["I_2_oracle", "residual_ratio"]
        if "dual" in pipelines:
            extras += ["I_2_dual", "S_half_A_dual", "S_half_B_dual", "moment_reading_gap"]
            extras += [f"R_{alpha_key(a)}_dual" for a in config.alphas]
        if "clifford" in pipelines:
            extras += CLIFFORD_EXTRAS
        return extras

    def _map_points(self, points: List[Tuple[int, int]], work: Callable[[int, int], ResultRow],
                    threads: int, label: str) -> List[ResultRow]:
        """Evaluate points on a worker pool and return rows in point order."""
        results: Dict[int, ResultRow] = {}
        show = self.progress and len(points) > 1
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            futures = {pool.submit(work, t, seed): index
                       for index, (t, seed) in enumerate(points)}
            for future in tqdm(as_completed(futures), total=len(futures), desc=label,
                               disable=not show):
                results[futures[future]] = future.result()
        return [results[index] for index in range(len(points))]

    def run(self, config: ExperimentConfig,
            pipelines: Optional[Sequence[str]] = None) -> Tuple[List[ResultRow], RunSummary]:
        """
        Evaluate every (t, seed) point of a document.

        Args:
            config: Validated experiment document
            pipelines: Pipelines to run; defaults to the document's list

        Returns:
            Rows in config order and the pass/fail summary
        """
        pipelines = list(pipelines or config.pipelines)
        points = [(t, seed) for seed in config.seeds for t in config.t_values]
        threads = config.threads if config.threads > 1 else self.threads
        events.info("run_started", pipelines=pipelines, points=len(points), threads=threads)
        started = time.perf_counter()

        rows = self._map_points(
            points, lambda t, seed: self._evaluate(config, t, seed, pipelines), threads, "run"
        )
        summary = self._summarize(config, rows, pipelines)
        events.info("run_finished", rows=len(rows), passed=summary.passed,
                    elapsed_s=round(time.perf_counter() - started, 3))
        return rows, summary

    def _evaluate(self, config: ExperimentConfig, t: int, seed: int,
                  pipelines: Sequence[str]) -> ResultRow:
        partition = to_partition(config.partition)
        row = ResultRow(t=t, seed=seed, in_regime=partition.in_regime(t))
        started = time.perf_counter()
        circuit_config = config.circuit(seed)
        notes: List[str] = []
        state = None
        try:
            if "oracle" in pipelines or "clifford" in pipelines:
                try:
                    _, gates, init, state = self.circuit.prepare(circuit_config, steps=t)
                except SizeGuardError as e:
                    logger.warning(f"State vector skipped at t={t}, seed={seed}: {e}")
                    notes.append("skipped: size")
            if state is None:
                gates = self.circuit.make_gates(circuit_config, steps=config.t_max)
                init = self.circuit.make_initial_state(circuit_config)

            if "oracle" in pipelines and state is not None:
                self._oracle_block(row, state, partition, config, notes)
            if "dual" in pipelines:
                self._dual_block(row, gates, init, partition, config, t, seed, notes)
            if "clifford" in pipelines and state is not None:
                self._clifford_block(row, gates, state, partition, t, circuit_config, notes)
        except BrickdualError as e:
            logger.error(f"Point t={t}, seed={seed} failed: {e}")
            notes.append(f"error: {e}")
        except Exception as e:
            logger.exception(f"Unexpected failure at t={t}, seed={seed}: {e}")
            notes.append(f"error: {e}")

        row.residual_relation = self._relation_residual(row)
        row.residual_pipelines = _abs_diff(row.E_oracle, row.E_dual)
        row.status = "; ".join(notes) if notes else "ok"
        row.runtime_s = round(time.perf_counter() - started, 6)
        events.debug("row_computed", t=t, seed=seed, residual_relation=row.residual_relation,
                     residual_pipelines=row.residual_pipelines, status=row.status)
        return row

    @staticmethod
    def _relation_residual(row: ResultRow) -> Optional[float]:
        if row.I_half_oracle is not None:
            E = row.E_oracle if row.E_oracle is not None else row.E_dual
            return None if E is None else abs(2.0 * E - row.I_half_oracle)
        if row.E_dual is not None and row.I_half_dual is not None:
            return abs(2.0 * row.E_dual - row.I_half_dual)
        return None

    def _oracle_block(self, row: ResultRow, state, partition: Partition,
                      config: ExperimentConfig, notes: List[str]) -> None:
        measured = self.oracle.measure(state, partition, config.alphas, config.moments)
        row.I_half_oracle = measured["I_half"]
        row.S_half_A = measured["S_half_A"]
        row.S_half_B = measured["S_half_B"]
        row.extras["I_2_oracle"] = measured["I_2"]
        if measured["E"] is None:
            notes.append("oracle negativity skipped: size")
            return
        row.E_oracle = measured["E"]
        row.moments_oracle = dict(measured["moments"])
        row.R_alpha = {alpha_key(a): value for a, value in measured["R_alpha"].items()}
        worst = 0.0
        for a, value in measured["R_alpha"].items():
            order = a / 2.0
            if order == 1.0:
                predicted = 0.0
            else:
                predicted = (1.0 - order) * self.oracle.mutual_information(state, partition, order)
            worst = max(worst, abs(value - predicted))
        row.extras["residual_ratio"] = worst

    def _dual_block(self, row: ResultRow, gates, init, partition: Partition,
                    config: ExperimentConfig, t: int, seed: int, notes: List[str]) -> None:
        if not row.in_regime and not config.force:
            notes.append("dual skipped: out of regime")
            return
        if t == 0:
            if init.kind != "product":
                notes.append("dual skipped: t=0 with MPS")
                return
            row.E_dual = 0.0
            row.I_half_dual = 0.0
            row.moments_dual = {n: 0.0 for n in config.moments}
            return
        transfers = self.duality.column_transfers(gates, init, t)
        method = "power" if init.kind == "mps" else config.method
        pairs = self.duality.interface_pairs(transfers, partition, method)
        measured = self.duality.measure(pairs, config.alphas, config.moments)
        row.E_dual = measured["E"]
        row.I_half_dual = measured["I_half"]
        row.extras["I_2_dual"] = measured["I_2"]
        row.extras["S_half_A_dual"] = measured["S_half_A"]
        row.extras["S_half_B_dual"] = measured["S_half_B"]
        row.moments_dual = {n: readings["closed_form"]
                            for n, readings in measured["moments"].items()}
        row.extras["moment_reading_gap"] = max(
            (abs(r["closed_form"] - r["replica_elements"]) for r in measured["moments"].values()),
            default=0.0,
        )
        for a, value in measured["R_alpha"].items():
            row.extras[f"R_{alpha_key(a)}_dual"] = value
        if config.snapshot and self.circuit_repository is not None:
            for name in INTERFACES:
                self.circuit_repository.save_snapshot(
                    pairs[name], f"{config.stem}_t{t}_s{seed}_{name}"
                )

    def _clifford_block(self, row: ResultRow, gates, state, partition: Partition, t: int,
                        circuit_config, notes: List[str]) -> None:
        if circuit_config.init.kind != "product" or circuit_config.init.state != "zero":
            raise ValueError("Clifford runs start from the all-zero product state")
        tableau = self.stabilizer.clifford_evolve(
            StabilizerTableau.zero_state(state.lattice.n_sites), gates, t
        )
        entropies = {region: self.stabilizer.stabilizer_entropy(
            tableau, partition.region_sites(region)) for region in ("A", "B", "C")}
        for region, value in entropies.items():
            row.extras[f"s_{region}"] = float(value)
            dense = self.oracle.region_entropy(state, partition.region_sites(region), 2.0)
            if abs(dense / np.log(2) - value) > self.stabilizer.integrality_tol:
                notes.append(f"stabilizer entropy mismatch in {region}")
        try:
            counts = self.stabilizer.ghz_bell_counts(tableau, partition, state)
        except SizeGuardError:
            notes.append("clifford counts skipped: size")
            return
        for name, value in counts.to_dict().items():
            row.extras[name] = float(value)

    def _summarize(self, config: ExperimentConfig, rows: List[ResultRow],
                   pipelines: Sequence[str]) -> RunSummary:
        summary = RunSummary(command="+".join(pipelines), rows=len(rows))
        exact_state = config.init.kind == "product"
        breakdowns = 0
        out_of_regime = 0
        for row in rows:
            where = f"t={row.t}, seed={row.seed}"
            if "error" in row.status:
                summary.fail(f"{where}: {row.status}")
                continue
            for key in ("2", "2_dual"):
                value = row.R_alpha.get(key, row.extras.get(f"R_{key}"))
                if value is not None and abs(value) > RATIO_ZERO_TOL:
                    summary.fail(f"{where}: R_{key} = {value:.3e}")
            if "stabilizer entropy mismatch" in row.status:
                summary.fail(f"{where}: {row.status}")
            if not row.in_regime:
                out_of_regime += 1
                if row.residual_relation is not None \
                        and row.residual_relation > self.breakdown_threshold:
                    breakdowns += 1
                continue
            if not exact_state:
                continue
            cross = row.E_oracle is None and row.E_dual is not None
            tol = self.pipeline_tol if cross else self.relation_tol
            if row.residual_relation is not None and row.residual_relation > tol:
                summary.fail(f"{where}: |2E - I_half| = {row.residual_relation:.3e}")
            if row.residual_pipelines is not None and row.residual_pipelines > self.pipeline_tol:
                summary.fail(f"{where}: |E_oracle - E_dual| = {row.residual_pipelines:.3e}")
            ratio = row.extras.get("residual_ratio")
            if ratio is not None and ratio > self.relation_tol:
                summary.fail(f"{where}: ratio relation residual {ratio:.3e}")
            for n, value in row.moments_dual.items():
                oracle = row.moments_oracle.get(n)
                if oracle is not None and abs(oracle - value) > self.pipeline_tol:
                    summary.fail(f"{where}: E_{2 * n} oracle {oracle:.12g} vs dual {value:.12g}")
            if row.extras.get("g_ABC", 0.0) != 0.0:
                summary.fail(f"{where}: g_ABC = {row.extras['g_ABC']:g} in the early-time regime")
        if "dual" in pipelines and "oracle" in pipelines:
            gaps = [row.extras.get("moment_reading_gap", 0.0) for row in rows]
            summary.moment_reading = (
                "closed form and replica elements agree"
                if max(gaps, default=0.0) <= self.pipeline_tol
                else "closed form matched; replica elements differ"
            )
        if out_of_regime:
            summary.notes.append(
                f"{breakdowns}/{out_of_regime} out-of-regime rows exceed "
                f"{self.breakdown_threshold:g}"
            )
        if not exact_state:
            summary.notes.append("MPS initial state: relation checks reported, not enforced")
        return summary

    # MPS scan

    def _ghz_report(self, config: ExperimentConfig, summary: RunSummary) -> None:
        lattice = LatticeSpec(d=config.d, L=config.L)
        init = self.circuit.make_initial_state(config.circuit())
        state = self.circuit.build_state(lattice, init)
        partition = to_partition(config.partition)
        rho_AB = self.oracle.reduce(state, partition.region_sites("AB"))
        E = self.oracle.log_negativity(rho_AB, partition.region_sites("A"))
        I_half = self.oracle.mutual_information(state, partition, 0.5)
        I_2 = self.oracle.mutual_information(state, partition, 2.0)
        spectrum = self.oracle.negativity_spectrum(rho_AB, partition.region_sites("A"))
        summary.notes.append(f"E = {E:.12g}, I_half = {I_half:.12g}, I_2 = {I_2:.12g} "
                             f"(ln 2 = {np.log(2):.12g})")
        summary.notes.append(f"negative eigenvalues of rho^tA: {spectrum.negative_count}")

    def mps_scan(self, config: ExperimentConfig) -> Tuple[List[ScanRow], RunSummary]:
        """
        Correction decay of an injective MPS quench over a ladder of subsystem sizes.

        Returns:
            Scan rows and a summary with the gap, the fitted slope and the verdict
        """
        if config.init.kind != "mps":
            raise ValueError("mps-scan needs an MPS initial state (init.kind = 'mps')")
        summary = RunSummary(command="mps-scan")
        init = self.circuit.make_initial_state(config.circuit())
        mps = self.duality.mps_transfer(init.cell_tensor(0))
        summary.gap = mps.gap
        events.info("run_started", command="mps-scan", chi=mps.chi, gap=mps.gap)
        if not mps.injective:
            summary.fail(
                "MPS is not injective: the fixed-point factorization does not hold and "
                "2E = I_half fails (GHZ counterexample)"
            )
            self._ghz_report(config, summary)
            return [], summary

        t = max([tv for tv in config.t_values if tv >= 1], default=1)
        ladder = config.ladder or [2 * t + 1, 2 * t + 2, 2 * t + 3]
        gates = self.circuit.make_gates(config.circuit(), steps=max(t, config.t_max))
        transfers = self.duality.column_transfers(gates, init, t)
        gap = mps.gap if mps.gap > 0 else None
        rows = []
        for size in ladder:
            residual, predicted = self.duality.factorization_check(
                transfers, t, x=0, length=size, method="power", gap=gap,
            )
            relation, status = self._scan_relation(config, size, t)
            rows.append(ScanRow(L_m=size, t=t, factorization_residual=residual,
                                predicted_scale=0.0 if predicted is None else predicted,
                                residual_relation=relation, status=status))
            events.debug("row_computed", L_m=size, residual=residual, status=status)

        residuals = [row.factorization_residual for row in rows]
        if any(b > a for a, b in zip(residuals, residuals[1:])):
            summary.fail(f"Correction does not decrease monotonically: {residuals}")
        if mps.gap > 0 and len(rows) >= 2 and min(residuals) > 0:
            fit = linregress([row.L_m for row in rows], np.log(residuals))
            summary.slope = float(fit.slope)
            expected = float(np.log(mps.gap))
            if abs(fit.slope - expected) > 0.3 * abs(expected):
                summary.fail(f"Fitted slope {fit.slope:.4f} not within 30% of ln gap {expected:.4f}")
        else:
            summary.notes.append("No subleading MPS eigenvalue: corrections vanish")
        summary.rows = len(rows)
        events.info("run_finished", command="mps-scan", rows=len(rows), passed=summary.passed)
        return rows, summary

    def _scan_relation(self, config: ExperimentConfig, size: int,
                       t: int) -> Tuple[Optional[float], str]:
        """Oracle |2E - I_half| with every region ``size`` cells long."""
        n_sites = 6 * size
        if n_sites > self.circuit.max_state_sites or 4 * size > self.oracle.max_dense_sites:
            return None, "skipped: size"
        payload = config.model_dump()
        payload.update(L=3 * size, partition={"L_A": size, "L_B": size, "L_C": size},
                       t_values=None)
        scaled = ExperimentConfig.model_validate(payload)
        _, _, _, state = self.circuit.prepare(scaled.circuit(), steps=t)
        partition = to_partition(scaled.partition)
        rho_AB = self.oracle.reduce(state, partition.region_sites("AB"))
        E = self.oracle.log_negativity(rho_AB, partition.region_sites("A"))
        I_half = self.oracle.mutual_information(state, partition, 0.5)
        return abs(2.0 * E - I_half), "ok"

    # Replica identities

    def replica_check(self, config: ExperimentConfig) -> Tuple[List[ResultRow], RunSummary]:
        """Replica identities and the exact ring trace at every (t, seed) with t >= 1."""
        points = [(t, seed) for seed in config.seeds for t in config.t_values if t >= 1]
        threads = config.threads if config.threads > 1 else self.threads
        events.info("run_started", command="replica-check", points=len(points))
        rows = self._map_points(points, lambda t, seed: self._replica_point(config, t, seed),
                                threads, "replica-check")
        summary = RunSummary(command="replica-check", rows=len(rows))
        for row in rows:
            where = f"t={row.t}, seed={row.seed}"
            if "error" in row.status:
                summary.fail(f"{where}: {row.status}")
                continue
            for key, value in row.extras.items():
                if key.startswith("identity_") and value > self.relation_tol:
                    summary.fail(f"{where}: {key} = {value:.3e}")
            for n, exact in row.moments_dual.items():
                oracle = row.moments_oracle.get(n)
                if oracle is not None and abs(exact - oracle) > self.pipeline_tol:
                    summary.fail(f"{where}: ring E_{2 * n} {exact:.12g} vs oracle {oracle:.12g}")
        events.info("run_finished", command="replica-check", passed=summary.passed)
        return rows, summary

    @staticmethod
    def replica_columns(config: ExperimentConfig) -> List[str]:
        extras = [f"identity_{k}_n{n}" for n in config.replica_n for k in (1, 2, 3)]
        return ResultRow.columns([], config.replica_n, extras)

    def _replica_point(self, config: ExperimentConfig, t: int, seed: int) -> ResultRow:
        partition = to_partition(config.partition)
        row = ResultRow(t=t, seed=seed, in_regime=partition.in_regime(t))
        started = time.perf_counter()
        notes: List[str] = []
        try:
            circuit_config = config.circuit(seed)
            gates = self.circuit.make_gates(circuit_config, steps=config.t_max)
            init = self.circuit.make_initial_state(circuit_config)
            transfers = self.duality.column_transfers(gates, init, t)
            method = "power" if init.kind == "mps" else config.method
            pair = self.duality.fixed_points(transfers, partition.x_AB, method)
            for n in config.replica_n:
                for k, value in enumerate(self.duality.replica_identity_check(pair, n), start=1):
                    row.extras[f"identity_{k}_n{n}"] = value
                try:
                    row.moments_dual[n] = self.duality.replica_trace(transfers, partition, n)
                except SizeGuardError as e:
                    logger.warning(f"Replica ring skipped for n={n}: {e}")
                    notes.append(f"ring n={n} skipped: size")
            try:
                _, _, _, state = self.circuit.prepare(circuit_config, steps=t)
                rho_AB = self.oracle.reduce(state, partition.region_sites("AB"))
                for n in row.moments_dual:
                    row.moments_oracle[n] = self.oracle.negativity_moments(
                        rho_AB, partition.region_sites("A"), n)
            except SizeGuardError:
                notes.append("oracle skipped: size")
        except BrickdualError as e:
            logger.error(f"Replica point t={t}, seed={seed} failed: {e}")
            notes.append(f"error: {e}")
        row.status = "; ".join(notes) if notes else "ok"
        row.runtime_s = round(time.perf_counter() - started, 6)
        return row
