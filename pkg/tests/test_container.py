"""
Unit tests for the dependency container.
"""
import configparser

from src.container import DEFAULTS, Container
from src.usecases.experiment_runner_usecase import ExperimentRunnerUseCase


class TestContainer:
    """Tests for the Container class."""

    def test_writes_default_config(self, tmp_path, monkeypatch):
        """Test that a missing config.ini is created with the defaults."""
        monkeypatch.delenv("BRICKDUAL_THREADS", raising=False)
        monkeypatch.delenv("BRICKDUAL_OUTPUT_DIR", raising=False)
        path = tmp_path / "config.ini"

        container = Container(config_path=str(path))

        parser = configparser.ConfigParser()
        parser.read(path)
        assert parser.getint("GUARDS", "max_state_sites") == 24
        assert parser.getboolean("APP", "progress") is True
        assert container.config["relation_tol"] == DEFAULTS["NUMERICS"]["relation_tol"]

    def test_reads_config(self, tmp_path, monkeypatch):
        """Test that values in config.ini reach the use cases."""
        monkeypatch.delenv("BRICKDUAL_THREADS", raising=False)
        path = tmp_path / "config.ini"
        path.write_text("[GUARDS]\nmax_dense_sites = 8\n[NUMERICS]\npower_max_iter = 77\n")

        container = Container(config_path=str(path))

        assert container.oracle_usecase.max_dense_sites == 8
        assert container.tensor_core.power_max_iter == 77
        assert container.circuit_usecase.max_state_sites == 24

    def test_environment_overrides(self, tmp_path, monkeypatch):
        """Test the BRICKDUAL_* variables."""
        monkeypatch.setenv("BRICKDUAL_THREADS", "3")
        monkeypatch.setenv("BRICKDUAL_OUTPUT_DIR", str(tmp_path / "env_out"))

        container = Container(config_path=str(tmp_path / "config.ini"))

        assert container.get_runner().threads == 3
        assert container.result_repository.output_dir == str(tmp_path / "env_out")

    def test_output_dir_argument(self, tmp_path, monkeypatch):
        """Test that the constructor argument beats the environment."""
        monkeypatch.setenv("BRICKDUAL_OUTPUT_DIR", str(tmp_path / "env_out"))

        container = Container(config_path=str(tmp_path / "config.ini"),
                              output_dir=str(tmp_path / "cli_out"))

        assert container.result_repository.output_dir == str(tmp_path / "cli_out")

    def test_get_runner(self, tmp_path):
        """Test the wiring of the harness."""
        container = Container(config_path=str(tmp_path / "config.ini"))
        runner = container.get_runner()

        assert isinstance(runner, ExperimentRunnerUseCase)
        assert runner.oracle is container.oracle_usecase
        assert runner.stabilizer.oracle is container.oracle_usecase
        assert runner.circuit_repository is container.circuit_repository
