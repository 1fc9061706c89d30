"""
JSON implementation of the CircuitRepository.
"""
import json
import logging
import os

from src.entities.duality import FixedPointPair
from src.entities.experiment import ExperimentConfig
from src.interfaces.repositories.circuit_repository import CircuitRepository

logger = logging.getLogger(__name__)


class JsonCircuitRepository(CircuitRepository):
    """Experiment documents anywhere on disk; snapshots under one directory."""

    def __init__(self, snapshots_dir: str):
        """
        Initialize the circuit repository.

        Args:
            snapshots_dir: Directory of fixed-point snapshot files
        """
        self.snapshots_dir = snapshots_dir

    def load_config(self, path: str) -> ExperimentConfig:
        if not os.path.exists(path):
            raise FileNotFoundError(f"File not found: {path}")
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
        config = ExperimentConfig.model_validate(payload)
        logger.debug(f"Loaded experiment document {path}")
        return config

    def save_config(self, config: ExperimentConfig, path: str) -> bool:
        try:
            directory = os.path.dirname(path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                json.dump(config.model_dump(mode="json"), f, ensure_ascii=False, indent=2)
            return True
        except OSError as e:
            logger.exception(f"Error saving experiment document {path}: {e}")
            return False

    def _snapshot_path(self, name: str) -> str:
        return os.path.join(self.snapshots_dir, f"{name}.json")

    def save_snapshot(self, pair: FixedPointPair, name: str) -> str:
        path = self._snapshot_path(name)
        try:
            os.makedirs(self.snapshots_dir, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                json.dump(pair.to_dict(), f, ensure_ascii=False, indent=2)
        except OSError as e:
            logger.error(f"Error writing snapshot {path}: {e}")
            raise IOError(f"Unwritable snapshot path: {path}") from e
        logger.info(f"Saved fixed-point snapshot {path}")
        return path

    def load_snapshot(self, name: str) -> FixedPointPair:
        path = self._snapshot_path(name)
        if not os.path.exists(path):
            raise FileNotFoundError(f"File not found: {path}")
        with open(path, "r", encoding="utf-8") as f:
            return FixedPointPair.from_dict(json.load(f))
