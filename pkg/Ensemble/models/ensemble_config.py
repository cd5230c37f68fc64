"""
Ensemble Domain Types
Validated physical parameters of a simulated spin ensemble.
"""

from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Steady state of the binned pseudo-spin when three levels are equally populated.
BINNED_STEADY_STATE = -1.0 / 3.0


class SpinSpecies(BaseModel):
    """Nuclear spin species read out through the electron spin."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    spin: float = Field(1.0, description="Spin quantum number I (1/2 or 1)")

    @field_validator("spin")
    @classmethod
    def _check_spin(cls, value: float) -> float:
        if value not in (0.5, 1.0):
            raise ValueError(f"spin must be 1/2 or 1, got {value}")
        return value

    @classmethod
    def nitrogen14(cls) -> "SpinSpecies":
        return cls(spin=1.0)

    @classmethod
    def spin_half(cls) -> "SpinSpecies":
        return cls(spin=0.5)

    @property
    def levels(self) -> int:
        """Number of Zeeman levels, 2I + 1."""
        return int(round(2 * self.spin)) + 1

    @property
    def is_binned(self) -> bool:
        """True when a two-outcome readout lumps several levels together."""
        return self.levels > 2


class EnsembleConfig(BaseModel):
    """
    Physical parameters of the ensemble.

    ``photons_per_unit`` is the baseline photon count of one readout repetition for the
    whole ensemble, and ``decay_counts`` is the relaxation constant expressed in
    accumulated baseline photons. Their ratio is the relaxation constant in repetitions.
    """

    model_config = ConfigDict(extra="forbid")

    n_nv: int = Field(..., ge=1, description="Number of emitters N_NV")
    species: SpinSpecies = Field(default_factory=SpinSpecies.nitrogen14)
    contrast: float = Field(..., gt=0.0, lt=1.0, description="Optical contrast c")
    photons_per_unit: float = Field(..., gt=0.0, description="Baseline photons per readout repetition")
    decay_counts: float = Field(..., gt=0.0, description="Relaxation constant n_T1 in accumulated photons")
    p0: float = Field(1.0, ge=-1.0, le=1.0, description="Prepared polarization used by polarized sequences")

    @property
    def decay_repetitions(self) -> float:
        """Relaxation constant in readout repetitions (m_T1)."""
        return self.decay_counts / self.photons_per_unit


class PolarizationState(BaseModel):
    """Polarization of the binned pseudo-spin-1/2 and its steady state."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    p: float = Field(..., ge=-1.0, le=1.0)
    p_ss: float = Field(BINNED_STEADY_STATE, ge=-1.0, le=1.0)

    @classmethod
    def for_species(cls, species: SpinSpecies, p: float) -> "PolarizationState":
        return cls(p=p, p_ss=BINNED_STEADY_STATE if species.is_binned else 0.0)


class CorrelationFunction(BaseModel):
    """Exponentially decaying autocorrelation C(tau) = sigma0^2 exp(-|tau| / t1)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    sigma0_sq: float = Field(..., gt=0.0)
    t1: float = Field(..., gt=0.0)

    @model_validator(mode="after")
    def _finite(self) -> "CorrelationFunction":
        if not (math.isfinite(self.sigma0_sq) and math.isfinite(self.t1)):
            raise ValueError("correlation parameters must be finite")
        return self

    def __call__(self, tau: float) -> float:
        return self.sigma0_sq * math.exp(-abs(tau) / self.t1)
