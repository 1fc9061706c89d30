"""
Unit tests for the ExperimentRunnerUseCase.
"""
import json
import os

import pytest

from src.entities.experiment import ExperimentConfig
from src.infrastructure.repositories.json_circuit_repository import JsonCircuitRepository
from src.infrastructure.services.tensor_core import NumpyTensorCore
from src.usecases.circuit_evolution_usecase import CircuitEvolutionUseCase
from src.usecases.clifford_stabilizer_usecase import CliffordStabilizerUseCase
from src.usecases.entanglement_oracle_usecase import EntanglementOracleUseCase
from src.usecases.experiment_runner_usecase import ExperimentRunnerUseCase
from src.usecases.spacetime_duality_usecase import SpacetimeDualityUseCase

EXPERIMENTS_DIR = os.path.join(os.path.dirname(__file__), "..", "..", "experiments")


def _runner(circuit_repository=None) -> ExperimentRunnerUseCase:
    core = NumpyTensorCore()
    oracle = EntanglementOracleUseCase(linear_algebra=core)
    return ExperimentRunnerUseCase(
        circuit=CircuitEvolutionUseCase(linear_algebra=core),
        oracle=oracle,
        duality=SpacetimeDualityUseCase(linear_algebra=core),
        stabilizer=CliffordStabilizerUseCase(oracle=oracle),
        circuit_repository=circuit_repository,
        progress=False,
    )


@pytest.fixture
def runner():
    return _runner()


def _config(**overrides) -> ExperimentConfig:
    payload = {
        "d": 2, "L": 6, "t_max": 1, "gate_family": "haar", "seed": 0,
        "partition": {"L_A": 2, "L_B": 2, "L_C": 2},
        "alphas": [0.5, 2.0], "moments": [1, 2],
    }
    payload.update(overrides)
    return ExperimentConfig.model_validate(payload)


def _experiment(name: str) -> ExperimentConfig:
    with open(os.path.join(EXPERIMENTS_DIR, name), "r", encoding="utf-8") as f:
        return ExperimentConfig.model_validate(json.load(f))


class TestRun:
    """Tests for oracle and dual sweeps."""

    def test_identity_circuit(self, runner):
        """Test that identity gates on a product state carry no correlations."""
        rows, summary = runner.run(_config(gate_family="identity", t_values=[1]))

        assert summary.passed, summary.failures
        assert rows[0].E_oracle == pytest.approx(0.0, abs=1e-10)
        assert rows[0].E_dual == pytest.approx(0.0, abs=1e-10)
        assert rows[0].I_half_oracle == pytest.approx(0.0, abs=1e-10)

    def test_haar_quench(self, runner):
        """Test 2E = I_half and pipeline agreement on a small Haar quench."""
        rows, summary = runner.run(_config(seeds=[0, 1]))

        assert summary.passed, summary.failures
        assert summary.moment_reading is not None
        assert [(row.t, row.seed) for row in rows] == [(0, 0), (1, 0), (0, 1), (1, 1)]
        late = rows[1]
        assert late.status == "ok"
        assert late.residual_relation <= 1e-9
        assert late.residual_pipelines <= 1e-8
        assert late.E_oracle > 0
        assert late.R_alpha["2"] == pytest.approx(0.0, abs=1e-10)

    def test_t_zero(self, runner):
        """Test that t = 0 rows are exact zeros in both pipelines."""
        rows, _ = runner.run(_config(t_values=[0]))

        assert rows[0].E_dual == 0.0
        assert rows[0].E_oracle == pytest.approx(0.0, abs=1e-12)

    def test_out_of_regime(self, runner):
        """Test that the dual pipeline refuses points outside the regime."""
        config = _config(L=3, partition={"L_A": 1, "L_B": 1, "L_C": 1}, t_values=[1])

        rows, summary = runner.run(config)

        assert not rows[0].in_regime
        assert rows[0].E_dual is None
        assert "out of regime" in rows[0].status
        assert rows[0].E_oracle is not None
        assert any("out-of-regime" in note for note in summary.notes)

    def test_pipeline_subset(self, runner):
        """Test that only the requested pipelines fill their columns."""
        rows, summary = runner.run(_config(t_values=[1]), ["dual"])

        assert summary.command == "dual"
        assert rows[0].E_oracle is None
        assert rows[0].E_dual is not None
        assert "I_2_dual" in rows[0].extras

    def test_threads_keep_order(self, runner):
        """Test that a worker pool returns the same rows as a single thread."""
        serial, _ = runner.run(_config(seeds=[0, 1, 2]))
        pooled, _ = runner.run(_config(seeds=[0, 1, 2], threads=3))

        assert [(r.t, r.seed) for r in serial] == [(r.t, r.seed) for r in pooled]
        assert [r.E_oracle for r in serial] == pytest.approx([r.E_oracle for r in pooled])

    def test_snapshots(self, tmp_path):
        """Test that fixed-point snapshots are written per interface."""
        runner = _runner(JsonCircuitRepository(str(tmp_path)))

        runner.run(_config(t_values=[1], snapshot=True, stem="snap"), ["dual"])

        assert sorted(os.listdir(tmp_path)) == [
            "snap_t1_s0_AB.json", "snap_t1_s0_BC.json", "snap_t1_s0_CA.json",
        ]

    def test_extra_columns(self):
        """Test the extra column names per pipeline."""
        config = _config()

        assert ExperimentRunnerUseCase.extra_columns(config, ["oracle"]) == [
            "I_2_oracle", "residual_ratio"]
        assert "R_0.5_dual" in ExperimentRunnerUseCase.extra_columns(config, ["dual"])
        assert "g_ABC" in ExperimentRunnerUseCase.extra_columns(config, ["clifford"])


class TestClifford:
    """Tests for the Clifford pipeline in the harness."""

    def test_clifford_run(self, runner):
        """Test stabilizer entropies and counts on a t = 1 Clifford quench."""
        config = _config(gate_family="clifford", t_values=[1], seeds=[0, 1],
                         pipelines=["oracle", "clifford"])

        rows, summary = runner.run(config)

        assert summary.passed, summary.failures
        for row in rows:
            assert row.extras["g_ABC"] == 0.0
            assert row.extras["s_A"] == row.extras["e_AB"] + row.extras["e_CA"]

    def test_clifford_needs_zero_state(self, runner):
        """Test that other initial states are reported as errors."""
        config = _config(gate_family="clifford", t_values=[1], init={"state": "plus"},
                         pipelines=["clifford"])

        rows, summary = runner.run(config)

        assert "error" in rows[0].status
        assert not summary.passed


class TestMpsScan:
    """Tests for the MPS correction scan."""

    def test_ghz_refused(self, runner):
        """Test that the GHZ MPS fails with the negativity report."""
        rows, summary = runner.mps_scan(_experiment("ghz.json"))

        assert rows == []
        assert not summary.passed
        assert "not injective" in summary.failures[0]
        assert summary.notes[0].startswith("E = ")

    def test_product_rejected(self, runner):
        """Test that a product initial state is not a scan."""
        with pytest.raises(ValueError):
            runner.mps_scan(_config())

    @pytest.mark.slow
    def test_perturbed_scan(self, runner):
        """Test the decaying correction of an injective MPS."""
        rows, summary = runner.mps_scan(_experiment("mps_scan.json"))

        assert summary.passed, summary.failures
        assert [row.L_m for row in rows] == [3, 4, 5]
        assert 0 < summary.gap < 1
        residuals = [row.factorization_residual for row in rows]
        assert residuals == sorted(residuals, reverse=True)

    def test_scan_columns(self, runner):
        """Test that each row carries the fixed-point correction and gap ** (L_m - 2t - 1)."""
        rows, summary = runner.mps_scan(_experiment("mps_scan.json"))
        t = rows[0].t

        for row in rows:
            assert row.predicted_scale == pytest.approx(summary.gap ** (row.L_m - 2 * t - 1))
            assert row.factorization_residual > 0


class TestReplicaCheck:
    """Tests for the replica identities command."""

    def test_replica_check(self, runner):
        """Test the identities and the exact ring trace on a short chain."""
        rows, summary = runner.replica_check(_experiment("replica.json"))

        assert summary.passed, summary.failures
        assert len(rows) == 3
        assert all(row.t == 1 for row in rows)
        assert rows[0].moments_dual[1] == pytest.approx(rows[0].moments_oracle[1], abs=1e-8)

    def test_replica_columns(self):
        """Test the identity columns per replica order."""
        columns = ExperimentRunnerUseCase.replica_columns(_config(replica_n=[1, 2]))

        assert "identity_3_n2" in columns
        assert "E_4_dual" in columns


@pytest.mark.slow
class TestAcceptance:
    """Longer runs over the bundled experiment documents."""

    def test_haar_t1(self, runner):
        """Test twenty Haar seeds at t = 1."""
        _, summary = runner.run(_experiment("haar_t1.json"))

        assert summary.passed, summary.failures

    def test_disordered_t1(self, runner):
        """Test ten disordered circuits with random product states."""
        rows, summary = runner.run(_experiment("disordered_t1.json"))

        assert summary.passed, summary.failures
        assert len(rows) == 10

    def test_clifford_t1(self, runner):
        """Test the Clifford seeds of the bundled document."""
        _, summary = runner.run(_experiment("clifford_t1.json"))

        assert summary.passed, summary.failures

    def test_disordered_entropies_differ(self, runner):
        """Test that disorder separates S_A from S_B while 2E = I_half holds."""
        rows, _ = runner.run(_experiment("disordered_t1.json"))

        assert max(abs(row.S_half_A - row.S_half_B) for row in rows) > 1e-3
        assert all(row.residual_relation <= 1e-9 for row in rows)

    def test_heavy_t2(self, runner):
        """Test 2 E_dual against the oracle I_half on 24 qubits."""
        rows, summary = runner.run(_experiment("heavy_t2.json"))

        assert summary.passed, summary.failures
        assert rows[0].E_oracle is None
        assert "oracle negativity skipped: size" in rows[0].status
        assert rows[0].residual_relation <= 1e-8

    def test_breakdown_out_of_regime(self, runner):
        """Test that 2E = I_half fails for most seeds once t exceeds the regime."""
        config = _config(t_max=2, t_values=[2], seeds=list(range(5)), pipelines=["oracle"])

        rows, _ = runner.run(config)

        assert not any(row.in_regime for row in rows)
        assert sum(row.residual_relation > 1e-3 for row in rows) >= 3

    def test_late_clifford_ghz(self, runner):
        """Test that some Clifford circuit develops GHZ content beyond the regime."""
        config = _config(L=3, partition={"L_A": 1, "L_B": 1, "L_C": 1}, t_max=3,
                         t_values=[3], gate_family="clifford", seeds=list(range(20)),
                         pipelines=["oracle", "clifford"])

        rows, summary = runner.run(config)

        assert summary.passed, summary.failures
        assert any(row.extras.get("g_ABC", 0.0) >= 1 for row in rows)
