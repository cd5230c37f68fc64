"""
Run configuration schemas (Pydantic).
Validates the YAML run file and the command-line overrides before any pipeline starts.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from Ensemble import EnsembleConfig
from Readout import ApdSettings, TelegraphSettings
from Sensitivity import DecayConvention, SensitivityParams
from Spectroscopy import SincConvention

from .errors import ConfigError

OutputFormat = Literal["csv", "json"]


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ----- Command blocks -----


class SimulationBlock(_Block):
    """Shot budget and detector/flip settings shared by the readout pipelines."""

    shots: int = Field(3000, ge=2, description="Experiments per point")
    active_fraction: float = Field(1.0, ge=0.0, le=1.0, description="Share of spins driven by pulses")
    telegraph: TelegraphSettings = Field(default_factory=TelegraphSettings)
    apd: ApdSettings = Field(default_factory=ApdSettings)


class CrossoverBlock(_Block):
    """Sweep of the repetition count for the shot-to-projection crossover."""

    m_values: List[int] = Field(
        default_factory=lambda: [1250, 2500, 5000, 10000, 25000], description="Strictly ascending repetitions"
    )
    k: float = Field(1.0, gt=0.0, le=1.1, description="Correction factor used in the decomposition")
    estimate_contrast: bool = False

    @field_validator("m_values")
    @classmethod
    def _ascending(cls, values: List[int]) -> List[int]:
        if len(values) < 4:
            raise ValueError("the crossover fit needs at least four repetition counts")
        if any(v < 1 for v in values) or any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("m_values must be positive and strictly ascending")
        return values


class RabiBlock(_Block):
    """Nitrogen Rabi sweep."""

    m: int = Field(5000, ge=1)
    angles_deg: List[float] = Field(default_factory=lambda: [15.0 * i for i in range(25)])
    bins: int = Field(40, ge=2)

    @field_validator("angles_deg")
    @classmethod
    def _non_empty(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("angle grid is empty")
        return values


class T1DecayBlock(_Block):
    """Polarization decay under repeated readout and its fit."""

    level: Literal["up", "zero"] = "up"
    m_values: List[int] = Field(default_factory=lambda: [1, 2000, 5000, 10000, 20000, 40000, 80000])
    source: Literal["photons", "latent"] = "photons"

    @field_validator("m_values")
    @classmethod
    def _ascending(cls, values: List[int]) -> List[int]:
        if len(values) < 3 or any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("need at least three strictly ascending repetition counts")
        return values


class DdSpecBlock(_Block):
    """XY8 sensing of an AC field followed by multi-axis readout."""

    b_osc: float = Field(1.84e-6, ge=0.0, description="Field amplitude in tesla")
    f: float = Field(250e3, gt=0.0, description="Field frequency in hertz")
    n_pulses: int = Field(8, ge=8)
    tau: Optional[float] = Field(None, gt=0.0, description="Pulse spacing in seconds; resonant when omitted")
    axes: Literal["xyz", "reconstruction"] = "reconstruction"
    shots: int = Field(2000, ge=2)
    m: int = Field(1, ge=1)
    k1: float = Field(1.0, gt=0.0, le=1.0)
    bins: int = Field(61, ge=2)
    convention: SincConvention = SincConvention.LITERAL
    relaxation_times: Optional[List[float]] = Field(None, description="Decay-time grid of the noise comparison")


class ReconstructBlock(_Block):
    """Deconvolution of dd-spec histograms and the coherent-state mixture fit."""

    input: str = Field(..., description="Directory holding histograms.csv and histograms.json")
    kernel: Literal["auto", "skellam", "gaussian"] = "auto"
    rabi_borders: Optional[Tuple[float, float]] = None
    n_components: int = Field(51, ge=1)
    delta_phi_step_deg: float = Field(1.0, gt=0.0)
    theta_range_deg: Tuple[float, float] = (45.0, 135.0)
    theta_step_deg: float = Field(1.0, gt=0.0)
    a_therm_step: float = Field(0.01, gt=0.0, le=1.0)
    refine: bool = True
    husimi_theta: int = Field(91, ge=2, description="Polar grid points of the Q field")
    husimi_phi: int = Field(181, ge=2, description="Azimuthal grid points of the Q field")


class SensitivityBlock(_Block):
    """Sensitivity map and optimizer report."""

    params: SensitivityParams = Field(default_factory=SensitivityParams)
    convention: DecayConvention = DecayConvention.CORRECTED
    tau_sens: List[float] = Field(
        default_factory=lambda: [10.0 ** (i / 4.0) for i in range(21)], description="Sensing times (us)"
    )
    m_values: List[float] = Field(default_factory=lambda: sorted({round(10.0 ** (i / 8.0)) for i in range(46)}))
    report_tau_sens: List[float] = Field(default_factory=lambda: [10.0, 100.0, 1e3, 1e4, 1e5])
    squeezing_db: float = Field(0.0, ge=0.0)
    squeezing_mode: Literal["db_amplitude", "literal"] = "db_amplitude"

    @model_validator(mode="after")
    def _grids(self) -> "SensitivityBlock":
        if not self.tau_sens or not self.m_values:
            raise ValueError("tau_sens and m_values grids must be non-empty")
        if min(self.tau_sens) <= 0 or min(self.m_values) < 1:
            raise ValueError("tau_sens must be positive and m_values at least 1")
        return self


class CalibrateApdBlock(_Block):
    """Reference-channel k calibration for one or more detector models."""

    m_values: List[int] = Field(default_factory=lambda: [100, 1000, 10000])
    shots: int = Field(3000, ge=2)
    detectors: List[ApdSettings] = Field(default_factory=lambda: [ApdSettings()])

    @field_validator("detectors")
    @classmethod
    def _non_empty(cls, values: List[ApdSettings]) -> List[ApdSettings]:
        if not values:
            raise ValueError("at least one detector model is required")
        return values


# ----- Run config -----


REQUIRED_BLOCKS: Dict[str, Tuple[str, ...]] = {
    "crossover": ("ensemble", "crossover"),
    "rabi": ("ensemble", "rabi"),
    "t1-decay": ("ensemble", "t1_decay"),
    "dd-spec": ("ensemble", "dd_spec"),
    "reconstruct": ("reconstruct",),
    "sensitivity": ("sensitivity",),
    "calibrate-apd": ("ensemble", "calibrate_apd"),
}


class RunConfig(BaseModel):
    """One declarative run: a block per subcommand plus seed and output settings."""

    model_config = ConfigDict(extra="forbid")

    seed: int = Field(0, ge=0, le=2**64 - 1)
    out: str = Field("out", description="Output directory")
    format: OutputFormat = "csv"
    ensemble: Optional[EnsembleConfig] = None
    simulation: SimulationBlock = Field(default_factory=SimulationBlock)
    crossover: Optional[CrossoverBlock] = None
    rabi: Optional[RabiBlock] = None
    t1_decay: Optional[T1DecayBlock] = None
    dd_spec: Optional[DdSpecBlock] = None
    reconstruct: Optional[ReconstructBlock] = None
    sensitivity: Optional[SensitivityBlock] = None
    calibrate_apd: Optional[CalibrateApdBlock] = None

    def require(self, command: str) -> None:
        """Raise ConfigError naming the first block ``command`` needs but the file lacks."""
        for block in REQUIRED_BLOCKS[command]:
            if getattr(self, block) is None:
                raise ConfigError(f"missing required block for '{command}'", path=block)

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def load_run_config(path: Optional[Path], overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """
    Read a YAML run file and apply top-level overrides (seed, out, format).

    Raises:
        ConfigError: File missing or not a mapping.
        ValidationError: Schema violations.
    """
    data: Dict[str, Any] = {}
    if path is not None:
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}", path="--config")
        try:
            loaded = yaml.safe_load(path.read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse YAML: {exc}", path=str(path)) from exc
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError("top level of the config must be a mapping", path=str(path))
        data = loaded
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    return RunConfig.model_validate(data)


__all__ = [
    'CalibrateApdBlock',
    'CrossoverBlock',
    'DdSpecBlock',
    'REQUIRED_BLOCKS',
    'RabiBlock',
    'ReconstructBlock',
    'RunConfig',
    'SensitivityBlock',
    'SimulationBlock',
    'T1DecayBlock',
    'load_run_config',
]
