"""
Sensitivity Types
Timing and photon budget of the two readout schemes, squeezing and the decay convention.
"""

from __future__ import annotations

from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from Spectroscopy import GAMMA_E

SqueezingMode = Literal["db_amplitude", "literal"]


class DecayConvention(str, Enum):
    """How nitrogen decay during m readouts reduces the effective contrast."""

    CORRECTED = "corrected"  # time average (m_T1 / m)(1 - e^(-m / m_T1)), bounded by 1
    LITERAL = "literal"  # (m / m_T1)(1 - e^(-m / m_T1)) with n_1 in the signal, as printed


class SensitivityParams(BaseModel):
    """
    Parameters of the sensitivity comparison. Durations are in microseconds.

    The photon count of one readout scales with the ensemble, n_1 = n1_per_nv * n_nv.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    tau_r: float = Field(1.0, ge=0.0, description="Single conventional readout (us)")
    tau_r_rep: float = Field(7.5, ge=0.0, description="One repetition of the repetitive readout (us)")
    tau_init: float = Field(5236.0, ge=0.0, description="Nitrogen initialization (us)")
    tau_rf: float = Field(600.0, ge=0.0, description="Electron to nitrogen mapping gate (us)")
    tau_sq: float = Field(3.0, ge=0.0, description="Squeezed-state preparation (us)")
    n1_per_nv: float = Field(0.036, gt=0.0, description="Photons per readout per NV")
    c: float = Field(0.15, gt=0.0, lt=1.0, description="Optical contrast")
    m_t1: float = Field(50000.0, gt=0.0, description="Repetitions to 1/e nitrogen decay")
    n_nv: int = Field(100, ge=1, description="Number of emitters")
    gamma_e: float = Field(GAMMA_E, gt=0.0, description="Electron gyromagnetic ratio (Hz/T)")

    @property
    def n1(self) -> float:
        return self.n1_per_nv * self.n_nv

    @property
    def repetitive_overhead(self) -> float:
        """Fixed part of the repetitive overhead, tau_init + tau_rf (us)."""
        return self.tau_init + self.tau_rf


class SqueezingSpec(BaseModel):
    """Squeezing of the collective state, as its dB value and the factor it puts on sigma_proj."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    xi_sq_db: float = Field(..., ge=0.0)
    amplitude_factor: float = Field(..., gt=0.0, le=1.0)

    @classmethod
    def from_db(cls, xi_sq_db: float, mode: SqueezingMode = "db_amplitude") -> "SqueezingSpec":
        """
        ``db_amplitude`` puts 10^(-dB/20) on the projection noise amplitude; ``literal`` reads
        the reduction 10^(-xi) with xi the squeezing in bels, 10^(-dB/10).
        """
        if mode == "db_amplitude":
            factor = 10.0 ** (-xi_sq_db / 20.0)
        elif mode == "literal":
            factor = 10.0 ** (-xi_sq_db / 10.0)
        else:
            raise ValueError(f"unknown squeezing mode: {mode}")
        return cls(xi_sq_db=xi_sq_db, amplitude_factor=factor)

    @model_validator(mode="after")
    def _unsqueezed_is_identity(self) -> "SqueezingSpec":
        if self.xi_sq_db == 0.0 and self.amplitude_factor != 1.0:
            raise ValueError("0 dB squeezing must leave the projection noise unchanged")
        return self
