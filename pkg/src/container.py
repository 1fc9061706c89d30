"""
Dependency injection container for brickdual.

Builds the numerics substrate, the pipelines, the harness and the
repositories from ``config.ini`` plus environment overrides.
"""
import os
import logging
import configparser
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from src.infrastructure.repositories.file_result_repository import FileResultRepository
from src.infrastructure.repositories.json_circuit_repository import JsonCircuitRepository
from src.infrastructure.services.tensor_core import NumpyTensorCore
from src.usecases.circuit_evolution_usecase import CircuitEvolutionUseCase
from src.usecases.clifford_stabilizer_usecase import CliffordStabilizerUseCase
from src.usecases.entanglement_oracle_usecase import EntanglementOracleUseCase
from src.usecases.experiment_runner_usecase import ExperimentRunnerUseCase
from src.usecases.spacetime_duality_usecase import SpacetimeDualityUseCase

logger = logging.getLogger(__name__)

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "APP": {"log_level": "INFO", "log_file": "", "threads": 1, "progress": True},
    "NUMERICS": {
        "hermitian_tol": 1e-8,
        "clip_relative": 1e-10,
        "noise_factor": 10.0,
        "gap_tol": 1e-6,
        "power_tol": 1e-11,
        "power_max_iter": 2000,
        "dense_limit": 4096,
        "pipeline_tol": 1e-8,
        "relation_tol": 1e-9,
        "breakdown_threshold": 1e-3,
        "integrality_tol": 1e-6,
    },
    "GUARDS": {"max_dense_sites": 12, "max_state_sites": 24,
               "replica_materialize_limit": 65536},
    "DATA": {"output_dir": "results", "snapshots_dir": "results/snapshots"},
}


class Container:
    """
    Dependency injection container.

    Owns one instance of every service, use case and repository and wires
    them together.
    """

    def __init__(self, config_path: Optional[str] = None, output_dir: Optional[str] = None):
        """
        Initialize the container.

        Args:
            config_path: Path to ``config.ini``
            output_dir: Output directory overriding the configured one
        """
        load_dotenv()
        self.config_path = config_path or os.getenv("BRICKDUAL_CONFIG", "config.ini")
        self.config = self._load_config()
        if output_dir:
            self.config["output_dir"] = output_dir

        self._init_repositories()
        self._init_services()
        self._init_usecases()

        logger.info("Dependency container initialized")

    def _load_config(self) -> Dict[str, Any]:
        """
        Load ``config.ini`` or fall back to the defaults.

        Returns:
            Flat dictionary of settings
        """
        if os.path.exists(self.config_path):
            logger.info(f"Loading configuration from {self.config_path}")
            parser = configparser.ConfigParser()
            parser.read(self.config_path)
            config = {}
            for section, values in DEFAULTS.items():
                for key, default in values.items():
                    if isinstance(default, bool):
                        config[key] = parser.getboolean(section, key, fallback=default)
                    elif isinstance(default, int):
                        config[key] = parser.getint(section, key, fallback=default)
                    elif isinstance(default, float):
                        config[key] = parser.getfloat(section, key, fallback=default)
                    else:
                        config[key] = parser.get(section, key, fallback=default)
        else:
            logger.warning(f"Configuration file {self.config_path} not found")
            config = self._create_default_config()

        config["output_dir"] = os.getenv("BRICKDUAL_OUTPUT_DIR", config["output_dir"])
        config["log_level"] = os.getenv("BRICKDUAL_LOG_LEVEL", config["log_level"])
        config["threads"] = int(os.getenv("BRICKDUAL_THREADS", config["threads"]))
        return config

    def _create_default_config(self) -> Dict[str, Any]:
        """
        Build the default configuration and try to write it to disk.

        Returns:
            Flat dictionary of default settings
        """
        logger.info("Creating default configuration")
        self._save_default_config()
        return {key: value for values in DEFAULTS.values() for key, value in values.items()}

    def _save_default_config(self) -> None:
        parser = configparser.ConfigParser()
        for section, values in DEFAULTS.items():
            parser[section] = {key: str(value).lower() if isinstance(value, bool) else str(value)
                               for key, value in values.items()}
        try:
            with open(self.config_path, "w", encoding="utf-8") as f:
                parser.write(f)
            logger.info(f"Default configuration written to {self.config_path}")
        except OSError as e:
            logger.warning(f"Could not write default configuration: {e}")

    def _init_repositories(self) -> None:
        """Initialize the file repositories."""
        logger.info("Initializing repositories")
        self.result_repository = FileResultRepository(output_dir=self.config["output_dir"])
        self.circuit_repository = JsonCircuitRepository(
            snapshots_dir=self.config["snapshots_dir"]
        )

    def _init_services(self) -> None:
        """Initialize the numerics substrate."""
        logger.info("Initializing services")
        self.tensor_core = NumpyTensorCore(
            hermitian_tol=self.config["hermitian_tol"],
            clip_relative=self.config["clip_relative"],
            power_tol=self.config["power_tol"],
            power_max_iter=self.config["power_max_iter"],
            dense_limit=self.config["dense_limit"],
            noise_factor=self.config["noise_factor"],
            gap_tol=self.config["gap_tol"],
        )

    def _init_usecases(self) -> None:
        """Initialize the pipelines and the harness."""
        logger.info("Initializing use cases")
        self.circuit_usecase = CircuitEvolutionUseCase(
            linear_algebra=self.tensor_core,
            max_state_sites=self.config["max_state_sites"],
        )
        self.oracle_usecase = EntanglementOracleUseCase(
            linear_algebra=self.tensor_core,
            max_dense_sites=self.config["max_dense_sites"],
            noise_factor=self.config["noise_factor"],
        )
        self.duality_usecase = SpacetimeDualityUseCase(
            linear_algebra=self.tensor_core,
            dense_limit=self.config["dense_limit"],
            normalization_tol=self.config["pipeline_tol"],
            replica_limit=self.config["replica_materialize_limit"],
            clip_relative=self.config["clip_relative"],
            noise_factor=self.config["noise_factor"],
        )
        self.stabilizer_usecase = CliffordStabilizerUseCase(
            oracle=self.oracle_usecase,
            integrality_tol=self.config["integrality_tol"],
        )
        self.runner_usecase = ExperimentRunnerUseCase(
            circuit=self.circuit_usecase,
            oracle=self.oracle_usecase,
            duality=self.duality_usecase,
            stabilizer=self.stabilizer_usecase,
            circuit_repository=self.circuit_repository,
            relation_tol=self.config["relation_tol"],
            pipeline_tol=self.config["pipeline_tol"],
            breakdown_threshold=self.config["breakdown_threshold"],
            threads=self.config["threads"],
            progress=self.config["progress"],
        )

    def get_runner(self) -> ExperimentRunnerUseCase:
        return self.runner_usecase
