"""
Interface for repositories that manage circuit documents and fixed-point snapshots.
"""
import abc

from src.entities.duality import FixedPointPair
from src.entities.experiment import ExperimentConfig


class CircuitRepository(abc.ABC):
    """Interface for JSON storage of experiment documents and fixed points."""

    @abc.abstractmethod
    def load_config(self, path: str) -> ExperimentConfig:
        """
        Load and validate an experiment document.

        Raises:
            FileNotFoundError: If the document does not exist
            json.JSONDecodeError: If the document is not valid JSON
            pydantic.ValidationError: If a field is invalid
        """
        pass

    @abc.abstractmethod
    def save_config(self, config: ExperimentConfig, path: str) -> bool:
        """
        Save an experiment document.

        Returns:
            True if the document was written
        """
        pass

    @abc.abstractmethod
    def save_snapshot(self, pair: FixedPointPair, name: str) -> str:
        """Write a fixed-point pair and return the file path."""
        pass

    @abc.abstractmethod
    def load_snapshot(self, name: str) -> FixedPointPair:
        """Read a fixed-point pair written by :meth:`save_snapshot`."""
        pass
