"""
Unit tests for the JsonCircuitRepository.
"""
import json
import os
import shutil
import tempfile
import unittest

import numpy as np
from pydantic import ValidationError

from src.entities.experiment import ExperimentConfig
from src.infrastructure.repositories.json_circuit_repository import JsonCircuitRepository
from src.infrastructure.services.tensor_core import NumpyTensorCore
from src.usecases.circuit_evolution_usecase import CircuitEvolutionUseCase
from src.usecases.spacetime_duality_usecase import SpacetimeDualityUseCase


class TestJsonCircuitRepository(unittest.TestCase):
    """Tests for the JsonCircuitRepository class."""

    def setUp(self):
        """Set up test environment before each test."""
        self.temp_dir = tempfile.mkdtemp()
        self.repository = JsonCircuitRepository(os.path.join(self.temp_dir, "snapshots"))
        self.document = {
            "d": 2, "L": 6, "t_max": 1, "gate_family": "haar", "seed": 2,
            "partition": {"L_A": 2, "L_B": 2, "L_C": 2},
            "stem": "sample",
        }
        self.document_path = os.path.join(self.temp_dir, "sample.json")
        with open(self.document_path, "w", encoding="utf-8") as f:
            json.dump(self.document, f)

    def tearDown(self):
        """Clean up after each test."""
        shutil.rmtree(self.temp_dir)

    def test_load_config(self):
        """Test loading a valid experiment document."""
        config = self.repository.load_config(self.document_path)

        self.assertIsInstance(config, ExperimentConfig)
        self.assertEqual(config.seed, 2)
        self.assertEqual(config.partition.L_B, 2)
        self.assertEqual(config.stem, "sample")

    def test_load_missing_config(self):
        """Test that a missing document raises FileNotFoundError."""
        with self.assertRaises(FileNotFoundError):
            self.repository.load_config(os.path.join(self.temp_dir, "missing.json"))

    def test_load_invalid_config(self):
        """Test that schema errors surface as ValidationError."""
        self.document["partition"]["L_C"] = 5
        with open(self.document_path, "w", encoding="utf-8") as f:
            json.dump(self.document, f)

        with self.assertRaises(ValidationError):
            self.repository.load_config(self.document_path)

    def test_save_config(self):
        """Test writing a document and reading it back."""
        config = self.repository.load_config(self.document_path)
        path = os.path.join(self.temp_dir, "nested", "copy.json")

        self.assertTrue(self.repository.save_config(config, path))
        self.assertEqual(self.repository.load_config(path), config)

    def test_snapshot_round_trip(self):
        """Test that fixed points survive a snapshot to 1e-12."""
        core = NumpyTensorCore()
        circuit = CircuitEvolutionUseCase(linear_algebra=core)
        duality = SpacetimeDualityUseCase(linear_algebra=core)
        config = ExperimentConfig.model_validate(self.document).circuit()
        transfers = duality.column_transfers(
            circuit.make_gates(config), circuit.make_initial_state(config), 1)
        pair = duality.fixed_points(transfers, 2)

        path = self.repository.save_snapshot(pair, "sample_AB")
        loaded = self.repository.load_snapshot("sample_AB")

        self.assertTrue(os.path.exists(path))
        self.assertEqual((loaded.t, loaded.d, loaded.x), (pair.t, pair.d, pair.x))
        self.assertLess(np.max(np.abs(loaded.l - pair.l)), 1e-12)
        self.assertLess(np.max(np.abs(loaded.r - pair.r)), 1e-12)
        self.assertLess(np.max(np.abs(loaded.X - pair.X)), 1e-12)

    def test_load_missing_snapshot(self):
        """Test that an unknown snapshot raises FileNotFoundError."""
        with self.assertRaises(FileNotFoundError):
            self.repository.load_snapshot("nothing")


if __name__ == "__main__":
    unittest.main()
