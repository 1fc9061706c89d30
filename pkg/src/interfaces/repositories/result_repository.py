"""
Interface for repositories that store sweep results.
"""
import abc
from typing import List

from src.entities.experiment import ResultRow, RunSummary, ScanRow


class ResultRepository(abc.ABC):
    """
    Interface for repositories that write result tables.

    A sweep is stored under a stem: the CSV table, its JSON mirror and the
    plot-data file share it.
    """

    @abc.abstractmethod
    def save_rows(self, rows: List[ResultRow], columns: List[str], stem: str) -> str:
        """
        Write the rows of a sweep.

        Args:
            rows: Result rows in config order
            columns: Fixed column order of the CSV table
            stem: File stem under the output directory

        Returns:
            Path of the CSV file

        Raises:
            IOError: If the output directory is not writable
        """
        pass

    @abc.abstractmethod
    def load_rows(self, stem: str) -> List[ResultRow]:
        """
        Read the JSON mirror of a sweep back into rows.

        Raises:
            FileNotFoundError: If the sweep was never written
        """
        pass

    @abc.abstractmethod
    def save_scan(self, rows: List[ScanRow], stem: str) -> str:
        """Write the table of an MPS correction scan and return its path."""
        pass

    @abc.abstractmethod
    def save_summary(self, summary: RunSummary, stem: str) -> str:
        """Write the pass/fail summary of a command and return its path."""
        pass
