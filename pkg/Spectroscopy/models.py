"""
Spectroscopy Types
AC signal, XY8 sequence, interaction strength and readout axes.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Electron gyromagnetic ratio in Hz/T
GAMMA_E = 28.04e9


class SincConvention(str, Enum):
    """Argument of the detuning sinc, with tau in microseconds."""

    LITERAL = "literal"  # (tau - tau0) N_p tau pi
    RESONANT_SPACING = "resonant_spacing"  # (tau - tau0) N_p tau0 pi
    FILTER = "filter"  # (tau - tau0) N_p pi / (2 tau0)


class AcSignal(BaseModel):
    """Monochromatic field B_osc sin(2 pi f t + lambda) with a phase lambda random per shot."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    b_osc: float = Field(..., ge=0.0, description="Amplitude in tesla")
    f: float = Field(..., gt=0.0, description="Frequency in hertz")

    @property
    def tau0(self) -> float:
        """Resonant inter-pulse spacing 1 / (2 f) in seconds."""
        return 1.0 / (2.0 * self.f)


class DdSequence(BaseModel):
    """XY8-N pulse train."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_pulses: int = Field(..., ge=8, description="Number of pi pulses")
    tau: float = Field(..., gt=0.0, description="Inter-pulse spacing in seconds")

    @field_validator("n_pulses")
    @classmethod
    def _whole_xy8_blocks(cls, value: int) -> int:
        if value % 8:
            raise ValueError(f"n_pulses must be a multiple of 8, got {value}")
        return value

    @property
    def tau_sens(self) -> float:
        return self.n_pulses * self.tau

    @classmethod
    def resonant(cls, signal: AcSignal, n_pulses: int = 8) -> "DdSequence":
        return cls(n_pulses=n_pulses, tau=signal.tau0)


class InteractionStrength(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., description="Resonant interaction strength in radians")
    alpha_prime: float = Field(..., description="Detuned interaction strength in radians")
    gamma_e: float = GAMMA_E

    @model_validator(mode="after")
    def _bounded(self) -> "InteractionStrength":
        if abs(self.alpha_prime) > abs(self.alpha) * (1.0 + 1e-12):
            raise ValueError("detuned interaction cannot exceed the resonant one")
        return self


class ReadoutAxis(BaseModel):
    """Quantization axis of a projective readout; theta from +Z, phi from +X."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    theta: float = Field(..., ge=0.0, le=math.pi)
    phi: float = 0.0

    @property
    def direction(self) -> np.ndarray:
        return np.array(
            [
                math.sin(self.theta) * math.cos(self.phi),
                math.sin(self.theta) * math.sin(self.phi),
                math.cos(self.theta),
            ]
        )

    @property
    def is_equatorial(self) -> bool:
        return abs(self.theta - math.pi / 2.0) < 1e-9

    @classmethod
    def x(cls) -> "ReadoutAxis":
        return cls(name="X", theta=math.pi / 2.0, phi=0.0)

    @classmethod
    def y(cls) -> "ReadoutAxis":
        return cls(name="Y", theta=math.pi / 2.0, phi=math.pi / 2.0)

    @classmethod
    def z(cls) -> "ReadoutAxis":
        return cls(name="Z", theta=0.0, phi=0.0)

    @classmethod
    def named(cls, name: str) -> "ReadoutAxis":
        factories = {"X": cls.x, "Y": cls.y, "Z": cls.z}
        if name.upper() not in factories:
            raise ValueError(f"unknown readout axis: {name}")
        return factories[name.upper()]()

    @classmethod
    def equatorial(cls, phi_degrees: float) -> "ReadoutAxis":
        return cls(name=f"phi{phi_degrees:+g}", theta=math.pi / 2.0, phi=math.radians(phi_degrees))


def reconstruction_axes(equatorial: int = 9, span_degrees: Tuple[float, float] = (-90.0, 90.0)) -> List[ReadoutAxis]:
    """Z plus equally spaced equatorial axes covering ``span_degrees``."""
    phis = np.linspace(span_degrees[0], span_degrees[1], equatorial)
    return [ReadoutAxis.z()] + [ReadoutAxis.equatorial(float(phi)) for phi in phis]
