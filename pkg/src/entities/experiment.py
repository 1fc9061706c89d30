"""
Schemas for experiment documents, result rows and run summaries.
"""
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

GateFamily = Literal["haar", "dual_unitary", "clifford", "identity", "swap", "custom"]
Pipeline = Literal["oracle", "dual", "clifford"]

BASE_COLUMNS = [
    "t", "seed", "in_regime",
    "E_oracle", "E_dual", "I_half_oracle", "I_half_dual",
    "S_half_A", "S_half_B",
]
TAIL_COLUMNS = ["residual_relation", "residual_pipelines", "status", "runtime_s"]


class MpsConfig(BaseModel):
    """Two-site MPS initial state."""

    model_config = ConfigDict(extra="forbid")

    preset: Literal["product", "ghz", "perturbed", "random", "custom"] = "perturbed"
    chi: int = Field(default=2, ge=1)
    epsilon: float = Field(default=0.3, ge=0.0)
    seed: int = 0
    tensor: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _custom_needs_tensor(self) -> "MpsConfig":
        if self.preset == "custom" and not self.tensor:
            raise ValueError("preset 'custom' needs 'tensor' as [[re, im], ...]")
        return self


class InitConfig(BaseModel):
    """Initial-state block of the circuit document."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["product", "mps"] = "product"
    state: Literal["zero", "plus", "random", "custom"] = "zero"
    amplitudes: Optional[List[List[float]]] = None
    mps: Optional[MpsConfig] = None

    @model_validator(mode="after")
    def _check_variant(self) -> "InitConfig":
        if self.kind == "product" and self.state == "custom" and not self.amplitudes:
            raise ValueError("state 'custom' needs 'amplitudes' as [[re, im], ...]")
        if self.kind == "mps" and self.mps is None:
            self.mps = MpsConfig()
        return self


class PartitionConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    L_A: int = Field(ge=1)
    L_B: int = Field(ge=1)
    L_C: int = Field(ge=0)
    offset: int = 0


class CircuitConfig(BaseModel):
    """Circuit document: lattice, gates and initial state."""

    model_config = ConfigDict(extra="forbid")

    d: int = Field(default=2, ge=2)
    L: int = Field(default=6, ge=2)
    t_max: int = Field(default=1, ge=0)
    gate_family: GateFamily = "haar"
    seed: int = 0
    homogeneous: bool = True
    coupling: float = 0.3
    custom_gate: Optional[List[List[float]]] = None
    init: InitConfig = Field(default_factory=InitConfig)

    @model_validator(mode="after")
    def _check_family(self) -> "CircuitConfig":
        if self.gate_family == "custom":
            if not self.custom_gate:
                raise ValueError("gate_family 'custom' needs 'custom_gate' as [[re, im], ...]")
            if len(self.custom_gate) != self.d ** 4:
                raise ValueError(
                    f"custom_gate needs {self.d ** 4} entries for d={self.d}, "
                    f"got {len(self.custom_gate)}"
                )
        if self.gate_family == "clifford" and self.d != 2:
            raise ValueError("gate_family 'clifford' requires d = 2")
        return self


class ExperimentConfig(CircuitConfig):
    """Circuit document plus the harness fields of one sweep."""

    partition: PartitionConfig
    t_values: Optional[List[int]] = None
    alphas: List[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0, 4.0])
    moments: List[int] = Field(default_factory=lambda: [1, 2])
    pipelines: List[Pipeline] = Field(default_factory=lambda: ["oracle", "dual"])
    seeds: List[int] = Field(default_factory=list)
    ladder: List[int] = Field(default_factory=list)
    replica_n: List[int] = Field(default_factory=lambda: [1])
    method: Literal["matrix_power", "power"] = "matrix_power"
    snapshot: bool = False
    force: bool = False
    threads: int = Field(default=1, ge=1)
    output: Optional[str] = None
    stem: str = "run"

    @model_validator(mode="after")
    def _check_harness(self) -> "ExperimentConfig":
        p = self.partition
        if p.L_A + p.L_B + p.L_C != self.L:
            raise ValueError(
                f"partition sizes sum to {p.L_A + p.L_B + p.L_C}, expected L={self.L}"
            )
        if self.t_values is None:
            self.t_values = list(range(self.t_max + 1))
        bad = [t for t in self.t_values if t < 0 or t > self.t_max]
        if bad:
            raise ValueError(f"t_values {bad} outside [0, t_max={self.t_max}]")
        if any(a <= 0 for a in self.alphas):
            raise ValueError("alphas must be positive")
        if any(n < 1 for n in self.moments + self.replica_n):
            raise ValueError("moments and replica_n must be positive integers")
        if not self.seeds:
            self.seeds = [self.seed]
        return self

    def circuit(self, seed: Optional[int] = None) -> CircuitConfig:
        """Circuit block of this document, optionally with another seed."""
        payload = {name: getattr(self, name) for name in CircuitConfig.model_fields}
        if seed is not None:
            payload["seed"] = seed
        return CircuitConfig(**payload)


class ResultRow(BaseModel):
    """One (t, seed) point of a sweep. Missing values stay ``None``."""

    t: int
    seed: int
    in_regime: bool
    E_oracle: Optional[float] = None
    E_dual: Optional[float] = None
    I_half_oracle: Optional[float] = None
    I_half_dual: Optional[float] = None
    S_half_A: Optional[float] = None
    S_half_B: Optional[float] = None
    moments_oracle: Dict[int, float] = Field(default_factory=dict)
    moments_dual: Dict[int, float] = Field(default_factory=dict)
    R_alpha: Dict[str, float] = Field(default_factory=dict)
    extras: Dict[str, float] = Field(default_factory=dict)
    residual_relation: Optional[float] = None
    residual_pipelines: Optional[float] = None
    status: str = "ok"
    runtime_s: float = 0.0

    @staticmethod
    def columns(alphas: List[float], moments: List[int], extras: List[str]) -> List[str]:
        """Fixed CSV column order for the given sweep grids."""
        cols = list(BASE_COLUMNS)
        for n in moments:
            cols += [f"E_{2 * n}_oracle", f"E_{2 * n}_dual"]
        cols += [f"R_{alpha_key(a)}" for a in alphas]
        cols += sorted(extras)
        return cols + TAIL_COLUMNS

    def flat(self) -> Dict[str, object]:
        """Flat mapping keyed by the column names of :meth:`columns`."""
        values: Dict[str, object] = {name: getattr(self, name) for name in BASE_COLUMNS}
        for n, value in self.moments_oracle.items():
            values[f"E_{2 * n}_oracle"] = value
        for n, value in self.moments_dual.items():
            values[f"E_{2 * n}_dual"] = value
        for key, value in self.R_alpha.items():
            values[f"R_{key}"] = value
        values.update(self.extras)
        for name in TAIL_COLUMNS:
            values[name] = getattr(self, name)
        return values


class ScanRow(BaseModel):
    """
    One ladder size of an MPS correction scan.

    ``factorization_residual`` is the transfer correction
    ``|| T_{x+L_m-1} ... T_x - |r^(x+L_m)><l^(x)| ||_F`` measured against the
    extracted fixed points; the slope fit runs on it. ``predicted_scale`` is
    ``gap ** (L_m - 2t - 1)``.
    """

    L_m: int
    t: int
    factorization_residual: float
    predicted_scale: Optional[float] = None
    residual_relation: Optional[float] = None
    status: str = "ok"


class RunSummary(BaseModel):
    """Pass/fail verdict of a harness command."""

    command: str
    rows: int = 0
    passed: bool = True
    failures: List[str] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    moment_reading: Optional[str] = None
    gap: Optional[float] = None
    slope: Optional[float] = None

    def fail(self, message: str) -> None:
        self.passed = False
        self.failures.append(message)


def alpha_key(alpha: float) -> str:
    """Column suffix of an alpha value: 0.5 -> '0.5', 2.0 -> '2'."""
    return f"{alpha:g}"
