"""
File-based implementation of the ResultRepository.
"""
import json
import logging
import os
from typing import List

import pandas as pd

from src.entities.experiment import ResultRow, RunSummary, ScanRow
from src.interfaces.repositories.result_repository import ResultRepository

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12e"
PLOT_COLUMNS = ["t", "seed", "two_E", "I_half"]


class FileResultRepository(ResultRepository):
    """
    Writes sweep tables as CSV through pandas, with a JSON mirror and a
    plot-data file next to them.
    """

    def __init__(self, output_dir: str):
        """
        Initialize the result repository.

        Args:
            output_dir: Directory receiving every table of a run
        """
        self.output_dir = output_dir
        logger.info(f"Initialized FileResultRepository at {output_dir}")

    def _path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def _ensure_dir(self) -> None:
        try:
            os.makedirs(self.output_dir, exist_ok=True)
        except OSError as e:
            logger.error(f"Cannot create output directory {self.output_dir}: {e}")
            raise IOError(f"Unwritable output path: {self.output_dir}") from e

    def _write_json(self, payload, path: str) -> None:
        try:
            with open(path, "w", encoding="utf-8") as f:
                json.dump(payload, f, ensure_ascii=False, indent=2)
        except OSError as e:
            logger.error(f"Error writing {path}: {e}")
            raise IOError(f"Unwritable output path: {path}") from e

    @staticmethod
    def _plot_frame(rows: List[ResultRow]) -> pd.DataFrame:
        records = []
        for row in rows:
            E = row.E_oracle if row.E_oracle is not None else row.E_dual
            I_half = row.I_half_oracle if row.I_half_oracle is not None else row.I_half_dual
            records.append({
                "t": row.t,
                "seed": row.seed,
                "two_E": None if E is None else 2.0 * E,
                "I_half": I_half,
            })
        return pd.DataFrame(records, columns=PLOT_COLUMNS)

    def save_rows(self, rows: List[ResultRow], columns: List[str], stem: str) -> str:
        self._ensure_dir()
        csv_path = self._path(f"{stem}.csv")
        frame = pd.DataFrame([row.flat() for row in rows], columns=columns)
        try:
            frame.to_csv(csv_path, index=False, float_format=FLOAT_FORMAT)
            self._plot_frame(rows).to_csv(self._path(f"{stem}_plot.csv"), index=False,
                                          float_format=FLOAT_FORMAT)
        except OSError as e:
            logger.error(f"Error writing {csv_path}: {e}")
            raise IOError(f"Unwritable output path: {csv_path}") from e
        self._write_json([row.model_dump(mode="json") for row in rows],
                         self._path(f"{stem}.json"))
        logger.info(f"Wrote {len(rows)} rows to {csv_path}")
        return csv_path

    def load_rows(self, stem: str) -> List[ResultRow]:
        path = self._path(f"{stem}.json")
        if not os.path.exists(path):
            raise FileNotFoundError(f"File not found: {path}")
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
        return [ResultRow.model_validate(item) for item in payload]

    def save_scan(self, rows: List[ScanRow], stem: str) -> str:
        self._ensure_dir()
        path = self._path(f"{stem}_scan.csv")
        frame = pd.DataFrame([row.model_dump() for row in rows],
                             columns=list(ScanRow.model_fields))
        try:
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        except OSError as e:
            logger.error(f"Error writing {path}: {e}")
            raise IOError(f"Unwritable output path: {path}") from e
        logger.info(f"Wrote {len(rows)} scan rows to {path}")
        return path

    def save_summary(self, summary: RunSummary, stem: str) -> str:
        self._ensure_dir()
        path = self._path(f"{stem}_summary.json")
        self._write_json(summary.model_dump(mode="json"), path)
        return path
