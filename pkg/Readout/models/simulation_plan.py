"""
Simulation Plan
Declarative description of one batch of simulated readout experiments.
"""

from __future__ import annotations

from typing import Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from Ensemble.models import EnsembleConfig

SequenceName = Literal["thermal", "polarized", "rabi", "custom"]
LevelName = Literal["up", "zero", "down"]
Initializer = Callable[[np.random.Generator, int], np.ndarray]


class TelegraphSettings(BaseModel):
    """Readout-induced spin flips."""

    model_config = ConfigDict(extra="forbid")

    topology: Literal["nearest", "uniform", "two_level"] = Field(
        "uniform", description="Which level pairs flip into each other"
    )
    zero_rate_factor: float = Field(1.0, gt=0.0, description="Leave rate of |0> relative to |+-1>")
    pinned: bool = Field(False, description="Disable flips entirely")


class ApdSettings(BaseModel):
    """Detector response applied after photon emission."""

    model_config = ConfigDict(extra="forbid")

    mode: Literal["linear", "multiplicative_k", "dead_time"] = "linear"
    k: float = Field(1.0, gt=0.0, le=1.0, description="Width compression factor")
    dead_time: float = Field(0.0, ge=0.0, description="Dead time in mean inter-photon intervals")

    @model_validator(mode="after")
    def _linear_means_unit_k(self) -> "ApdSettings":
        if self.mode == "linear" and self.k != 1.0:
            raise ValueError("linear APD mode requires k = 1")
        return self


class SimulationPlan(BaseModel):
    """Everything needed to regenerate a batch of shots bit for bit."""

    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)

    cfg: EnsembleConfig
    m: int = Field(..., ge=1, description="Readout repetitions per experiment")
    shots: int = Field(..., ge=1, description="Independent experiments")
    seed: int = Field(0, ge=0, le=2**64 - 1)
    sequence: SequenceName = "thermal"
    level: LevelName = Field("up", description="Prepared level for the polarized sequence")
    angle: float = Field(0.0, description="Rotation angle in radians for the rabi sequence")
    active_fraction: float = Field(1.0, ge=0.0, le=1.0, description="Share of spins driven by pulses")
    telegraph: TelegraphSettings = Field(default_factory=TelegraphSettings)
    apd: ApdSettings = Field(default_factory=ApdSettings)
    initializer: Optional[Initializer] = Field(None, exclude=True)

    @model_validator(mode="after")
    def _check_sequence(self) -> "SimulationPlan":
        if self.sequence == "custom" and self.initializer is None:
            raise ValueError("custom sequence requires an initializer")
        if self.level == "zero" and not self.cfg.species.is_binned:
            raise ValueError("level 'zero' needs a three-level species")
        return self

    @property
    def m_t1(self) -> float:
        """Relaxation constant in repetitions."""
        return self.cfg.decay_repetitions

    @property
    def photons(self) -> float:
        """Baseline photon count n accumulated over the m repetitions."""
        return self.cfg.photons_per_unit * self.m
