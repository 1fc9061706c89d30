"""
Implementation of the command-line interface.

Subcommands: quench, dual, compare, clifford, mps-scan, replica-check.
Exit codes: 0 when every check passes, 1 on an acceptance failure, 2 on a
configuration error.
"""
import json
import logging
from typing import Optional, Sequence

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from src.config.logging_config import configure_logging
from src.container import Container
from src.entities.exceptions import BrickdualError
from src.entities.experiment import ExperimentConfig, ResultRow, RunSummary, ScanRow

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

PIPELINES = {
    "quench": ["oracle"],
    "dual": ["dual"],
    "clifford": ["oracle", "clifford"],
}

app = typer.Typer(add_completion=False, help="Brick-work circuit entanglement lab")


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


class CommandLineInterface:
    """
    Runs one harness command and renders its outcome.

    This class handles:
    - Loading the experiment document and applying flag overrides
    - Dispatching to the harness and writing the tables
    - Printing rich tables and mapping the verdict to an exit code
    """

    def __init__(self, container: Container, console: Optional[Console] = None):
        """
        Initialize the command-line interface.

        Args:
            container: Fully wired dependency container
            console: Rich console for output
        """
        self.container = container
        self.runner = container.get_runner()
        self.result_repository = container.result_repository
        self.circuit_repository = container.circuit_repository
        self.console = console or Console()

    def load_config(self, path: str, seed: Optional[int] = None, force: bool = False,
                    threads: Optional[int] = None, out: Optional[str] = None) -> ExperimentConfig:
        """Load the document and apply the --seed, --force, --threads and --out flags."""
        config = self.circuit_repository.load_config(path)
        payload = config.model_dump()
        if seed is not None:
            payload["seed"] = seed
            payload["seeds"] = [seed]
        if force:
            payload["force"] = True
        if threads is not None:
            payload["threads"] = threads
        if out is not None:
            payload["output"] = out
        config = ExperimentConfig.model_validate(payload)
        if config.output:
            self.result_repository.output_dir = config.output
        return config

    def show_rows(self, rows: Sequence[ResultRow], title: str) -> None:
        table = Table(title=title)
        for name in ("t", "seed", "regime", "E_oracle", "E_dual", "I_half", "|2E-I|",
                     "|dE|", "status"):
            table.add_column(name)
        for row in rows:
            I_half = row.I_half_oracle if row.I_half_oracle is not None else row.I_half_dual
            table.add_row(str(row.t), str(row.seed), "yes" if row.in_regime else "no",
                          _fmt(row.E_oracle), _fmt(row.E_dual), _fmt(I_half),
                          _fmt(row.residual_relation), _fmt(row.residual_pipelines), row.status)
        self.console.print(table)

    def show_scan(self, rows: Sequence[ScanRow]) -> None:
        table = Table(title="MPS correction scan")
        for name in ("L_m", "t", "||T^L - |r><l|||", "gap^(L-2t-1)", "|2E-I|", "status"):
            table.add_column(name)
        for row in rows:
            table.add_row(str(row.L_m), str(row.t), _fmt(row.factorization_residual),
                          _fmt(row.predicted_scale), _fmt(row.residual_relation), row.status)
        self.console.print(table)

    def show_summary(self, summary: RunSummary) -> int:
        verdict = "[green]PASS[/green]" if summary.passed else "[red]FAIL[/red]"
        self.console.print(f"{summary.command}: {verdict} ({summary.rows} rows)")
        if summary.moment_reading:
            self.console.print(f"moments: {summary.moment_reading}")
        if summary.gap is not None:
            self.console.print(f"MPS gap: {summary.gap:.6g}")
        if summary.slope is not None:
            self.console.print(f"fitted slope: {summary.slope:.6g}")
        for note in summary.notes:
            self.console.print(f"note: {note}")
        for failure in summary.failures:
            self.console.print(f"[red]failure[/red]: {failure}")
        return EXIT_OK if summary.passed else EXIT_FAILURE

    def sweep(self, command: str, config: ExperimentConfig) -> int:
        pipelines = PIPELINES.get(command, list(config.pipelines))
        rows, summary = self.runner.run(config, pipelines)
        summary.command = command
        stem = f"{config.stem}_{command}"
        columns = ResultRow.columns(config.alphas, config.moments,
                                    self.runner.extra_columns(config, pipelines))
        self.result_repository.save_rows(rows, columns, stem)
        self.result_repository.save_summary(summary, stem)
        self.show_rows(rows, command)
        return self.show_summary(summary)

    def scan(self, config: ExperimentConfig) -> int:
        rows, summary = self.runner.mps_scan(config)
        stem = f"{config.stem}_mps"
        self.result_repository.save_scan(rows, stem)
        self.result_repository.save_summary(summary, stem)
        if rows:
            self.show_scan(rows)
        return self.show_summary(summary)

    def replica(self, config: ExperimentConfig) -> int:
        rows, summary = self.runner.replica_check(config)
        stem = f"{config.stem}_replica"
        self.result_repository.save_rows(rows, self.runner.replica_columns(config), stem)
        self.result_repository.save_summary(summary, stem)
        self.show_rows(rows, "replica-check")
        return self.show_summary(summary)


def _execute(ctx: typer.Context, command: str, config_path: str, out: Optional[str],
             seed: Optional[int], force: bool, threads: Optional[int],
             settings: Optional[str]) -> None:
    console = Console()
    try:
        container = Container(config_path=settings, output_dir=out)
        flags = ctx.obj or {}
        if flags.get("log_level") is None and flags.get("log_file") is None:
            configure_logging(container.config["log_level"], container.config["log_file"] or None)
        cli = CommandLineInterface(container, console)
        config = cli.load_config(config_path, seed, force, threads, out)
        if command == "mps-scan":
            code = cli.scan(config)
        elif command == "replica-check":
            code = cli.replica(config)
        else:
            code = cli.sweep(command, config)
    except ValidationError as e:
        for error in e.errors():
            path = ".".join(str(part) for part in error["loc"]) or "<document>"
            console.print(f"[red]config error[/red] at {path}: {error['msg']}")
        code = EXIT_CONFIG
    except json.JSONDecodeError as e:
        console.print(f"[red]config error[/red]: invalid JSON ({e})")
        code = EXIT_CONFIG
    except FileNotFoundError as e:
        console.print(f"[red]config error[/red]: {e}")
        code = EXIT_CONFIG
    except BrickdualError as e:
        logger.error(f"{command} failed: {e}")
        console.print(f"[red]failure[/red]: {e}")
        code = EXIT_FAILURE
    except ValueError as e:
        console.print(f"[red]config error[/red]: {e}")
        code = EXIT_CONFIG
    except Exception as e:
        logger.exception(f"Unexpected error in {command}: {e}")
        code = EXIT_FAILURE
    raise typer.Exit(code=code)


ConfigOption = typer.Option(..., "--config", help="Experiment document (JSON)")
OutOption = typer.Option(None, "--out", help="Output directory")
SeedOption = typer.Option(None, "--seed", help="Override the document's seed")
ForceOption = typer.Option(False, "--force", help="Evaluate dual formulas out of regime")
ThreadsOption = typer.Option(None, "--threads", help="Worker threads")
SettingsOption = typer.Option(None, "--settings", help="Application settings (config.ini)")


@app.callback()
def main_callback(
    ctx: typer.Context,
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Logging level"),
    log_file: Optional[str] = typer.Option(None, "--log-file", help="Rotating JSON log file"),
):
    """Brick-work circuit entanglement lab."""
    ctx.obj = {"log_level": log_level, "log_file": log_file}
    configure_logging(log_level or "INFO", log_file)


@app.command()
def quench(ctx: typer.Context, config: str = ConfigOption, out: Optional[str] = OutOption,
           seed: Optional[int] = SeedOption, force: bool = ForceOption,
           threads: Optional[int] = ThreadsOption, settings: Optional[str] = SettingsOption):
    """Brute-force oracle sweep."""
    _execute(ctx, "quench", config, out, seed, force, threads, settings)


@app.command()
def dual(ctx: typer.Context, config: str = ConfigOption, out: Optional[str] = OutOption,
         seed: Optional[int] = SeedOption, force: bool = ForceOption,
         threads: Optional[int] = ThreadsOption, settings: Optional[str] = SettingsOption):
    """Space-time dual pipeline sweep."""
    _execute(ctx, "dual", config, out, seed, force, threads, settings)


@app.command()
def compare(ctx: typer.Context, config: str = ConfigOption, out: Optional[str] = OutOption,
            seed: Optional[int] = SeedOption, force: bool = ForceOption,
            threads: Optional[int] = ThreadsOption, settings: Optional[str] = SettingsOption):
    """Both pipelines with cross-pipeline residuals."""
    _execute(ctx, "compare", config, out, seed, force, threads, settings)


@app.command()
def clifford(ctx: typer.Context, config: str = ConfigOption, out: Optional[str] = OutOption,
             seed: Optional[int] = SeedOption, force: bool = ForceOption,
             threads: Optional[int] = ThreadsOption, settings: Optional[str] = SettingsOption):
    """Stabilizer runs with Bell/GHZ counts."""
    _execute(ctx, "clifford", config, out, seed, force, threads, settings)


@app.command("mps-scan")
def mps_scan(ctx: typer.Context, config: str = ConfigOption, out: Optional[str] = OutOption,
             seed: Optional[int] = SeedOption, force: bool = ForceOption,
             threads: Optional[int] = ThreadsOption, settings: Optional[str] = SettingsOption):
    """Correction decay of an injective MPS quench."""
    _execute(ctx, "mps-scan", config, out, seed, force, threads, settings)


@app.command("replica-check")
def replica_check(ctx: typer.Context, config: str = ConfigOption, out: Optional[str] = OutOption,
                  seed: Optional[int] = SeedOption, force: bool = ForceOption,
                  threads: Optional[int] = ThreadsOption,
                  settings: Optional[str] = SettingsOption):
    """Replica identities and the exact replica ring."""
    _execute(ctx, "replica-check", config, out, seed, force, threads, settings)
