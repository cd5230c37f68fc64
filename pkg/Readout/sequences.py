"""
Readout Sequences
Initial-state preparations: thermal, polarized, nitrogen Rabi pulse and user supplied.
"""

from __future__ import annotations

from typing import Callable, Dict

import numpy as np

from .models import SimulationPlan
from .sequence_interface import ReadoutSequence
from .telegraph import LEVEL_INDEX, UP

# Level addressed together with the bright level by the nuclear Rabi drive.
_RABI_PARTNER = 1


class ThermalSequence(ReadoutSequence):
    """All levels equally populated."""

    def initialize(self, rng: np.random.Generator, n_spins: int, levels: int) -> np.ndarray:
        return rng.integers(0, levels, size=n_spins)

    def get_sequence_name(self) -> str:
        return "thermal"


class PolarizedSequence(ReadoutSequence):
    """
    Spins prepared in one level with finite fidelity.

    With polarization p0 the target level holds (1 + p0) / 2 of the spins and the rest are
    spread evenly over the other levels, so p0 = -1/3 reproduces the thermal state of a
    three-level spin read as up.
    """

    def __init__(self, level: str = "up", p0: float = 1.0):
        if not -1.0 <= p0 <= 1.0:
            raise ValueError(f"p0 must be in [-1, 1], got {p0}")
        self.level = level
        self.p0 = p0

    def initialize(self, rng: np.random.Generator, n_spins: int, levels: int) -> np.ndarray:
        target = LEVEL_INDEX[levels][self.level]
        weight = (1.0 + self.p0) / 2.0
        hit = rng.random(n_spins) < weight
        others = rng.integers(0, levels - 1, size=n_spins)
        others = others + (others >= target)
        return np.where(hit, target, others)

    def get_sequence_name(self) -> str:
        return "polarized"


class RabiSequence(ReadoutSequence):
    """
    Polarize into the bright level, then drive the bright-to-partner transition by an angle.

    Only the active share of spins follows the drive; the others keep their prepared level.
    """

    def __init__(self, angle: float, p0: float = 1.0, active_fraction: float = 1.0):
        self.angle = angle
        self.active_fraction = active_fraction
        self._preparation = PolarizedSequence("up", p0)

    def initialize(self, rng: np.random.Generator, n_spins: int, levels: int) -> np.ndarray:
        level = self._preparation.initialize(rng, n_spins, levels)
        active = rng.random(n_spins) < self.active_fraction
        rotated = active & (rng.random(n_spins) < np.sin(self.angle / 2.0) ** 2)
        swapped = level.copy()
        swapped[rotated & (level == UP)] = _RABI_PARTNER
        swapped[rotated & (level == _RABI_PARTNER)] = UP
        return swapped

    def get_sequence_name(self) -> str:
        return "rabi"


class CustomSequence(ReadoutSequence):
    """Wraps a user callable ``initializer(rng, n_spins) -> levels``."""

    def __init__(self, initializer: Callable[[np.random.Generator, int], np.ndarray]):
        self.initializer = initializer

    def initialize(self, rng: np.random.Generator, n_spins: int, levels: int) -> np.ndarray:
        level = np.asarray(self.initializer(rng, n_spins), dtype=np.int64)
        if level.shape != (n_spins,) or level.min() < 0 or level.max() >= levels:
            raise ValueError("custom initializer returned invalid levels")
        return level

    def get_sequence_name(self) -> str:
        return "custom"


SEQUENCES: Dict[str, Callable[[SimulationPlan], ReadoutSequence]] = {
    "thermal": lambda plan: ThermalSequence(),
    "polarized": lambda plan: PolarizedSequence(plan.level, plan.cfg.p0),
    "rabi": lambda plan: RabiSequence(plan.angle, plan.cfg.p0, plan.active_fraction),
    "custom": lambda plan: CustomSequence(plan.initializer),
    # more preparations register here
}


def build_sequence(plan: SimulationPlan) -> ReadoutSequence:
    """Instantiate the sequence named by the plan."""
    if plan.sequence not in SEQUENCES:
        raise ValueError(f"Sequence '{plan.sequence}' not found. Available: {', '.join(SEQUENCES)}")
    return SEQUENCES[plan.sequence](plan)
