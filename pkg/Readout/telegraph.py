"""
Telegraph Model
Readout-induced random telegraph dynamics of individual nuclear spins.

Levels are indexed from the bright level: (up, zero, down) for I = 1 and (up, down) for
I = 1/2. Each readout repetition first reads a spin in its current level, then the spin
may jump. Evolution is event driven: dwell times are drawn from the geometric
distribution, so cost scales with the number of jumps rather than with m.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .models import SimulationPlan, TelegraphSettings

Topology = Literal["nearest", "uniform", "two_level"]

UP = 0
LEVEL_INDEX = {
    3: {"up": 0, "zero": 1, "down": 2},
    2: {"up": 0, "down": 1},
}

_NEVER = np.iinfo(np.int64).max

# Destination probabilities once a spin leaves its level.
_DESTINATIONS = {
    "nearest": np.array([[0.0, 1.0, 0.0], [0.5, 0.0, 0.5], [0.0, 1.0, 0.0]]),
    "uniform": np.array([[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]]),
    "two_level": np.array([[0.0, 1.0], [1.0, 0.0]]),
}


@dataclass(frozen=True)
class TelegraphPath:
    """Outcome of evolving a set of spins over m repetitions."""

    final_levels: np.ndarray
    up_fraction: np.ndarray


class TelegraphModel:
    """
    Per-repetition jump process of one spin species.

    ``m_t1`` is the number of repetitions after which the binned polarization has relaxed
    to 1/e of its initial excess. The ``uniform`` and ``two_level`` topologies relax in that
    single mode; ``nearest`` adds a second mode at three times the rate.
    """

    def __init__(
        self,
        levels: int = 3,
        m_t1: float = np.inf,
        topology: Topology = "uniform",
        zero_rate_factor: float = 1.0,
    ):
        """
        Initialize a TelegraphModel.

        Args:
            levels: Number of levels, 2 or 3.
            m_t1: Relaxation constant in repetitions; infinity pins the spins.
            topology: ``nearest``, ``uniform`` or ``two_level``.
            zero_rate_factor: Leave rate of |0> relative to the outer levels.

        Raises:
            ValueError: If the combination of levels and topology is not supported.
        """
        if levels not in LEVEL_INDEX:
            raise ValueError(f"levels must be 2 or 3, got {levels}")
        if levels == 2:
            topology = "two_level"
        elif topology == "two_level":
            raise ValueError("two_level topology needs a spin-1/2 species")
        if not m_t1 > 0:
            raise ValueError(f"m_t1 must be positive, got {m_t1}")
        if zero_rate_factor <= 0:
            raise ValueError("zero_rate_factor must be positive")

        self.levels = levels
        self.m_t1 = float(m_t1)
        self.topology = topology
        self.zero_rate_factor = zero_rate_factor
        self._destinations = _DESTINATIONS[topology]
        self._leave = self._leave_probabilities()

    @classmethod
    def from_settings(cls, settings: TelegraphSettings, levels: int, m_t1: float) -> "TelegraphModel":
        if settings.pinned:
            m_t1 = np.inf
        return cls(
            levels=levels,
            m_t1=m_t1,
            topology=settings.topology,
            zero_rate_factor=settings.zero_rate_factor,
        )

    @classmethod
    def from_plan(cls, plan: SimulationPlan) -> "TelegraphModel":
        return cls.from_settings(plan.telegraph, plan.cfg.species.levels, plan.m_t1)

    def _leave_probabilities(self) -> np.ndarray:
        step = -np.expm1(-1.0 / self.m_t1)
        if self.topology == "two_level":
            return np.array([step / 2.0, step / 2.0])
        if self.topology == "nearest":
            edge = step
            leave = np.array([edge, 2.0 * edge, edge])
        else:
            leave = np.full(3, 2.0 * step / 3.0)
        leave[1] = min(1.0, leave[1] * self.zero_rate_factor)
        return leave

    @property
    def leave_probabilities(self) -> np.ndarray:
        return self._leave.copy()

    def transition_matrix(self) -> np.ndarray:
        """Per-repetition transition matrix; rows sum to one."""
        stay = np.diag(1.0 - self._leave)
        return stay + self._leave[:, None] * self._destinations

    def stationary_distribution(self) -> np.ndarray:
        """
        Level occupation the jump process relaxes to.

        Pinned spins never relax; they report the thermal (uniform) occupation.
        """
        if not np.any(self._leave > 0):
            return np.full(self.levels, 1.0 / self.levels)
        system = np.vstack([self.transition_matrix().T - np.eye(self.levels), np.ones(self.levels)])
        target = np.zeros(self.levels + 1)
        target[-1] = 1.0
        weights, *_ = np.linalg.lstsq(system, target, rcond=None)
        weights = np.clip(weights, 0.0, None)
        return weights / weights.sum()

    @property
    def steady_state_polarization(self) -> float:
        """Binned polarization 2 p_up - 1 of the stationary distribution."""
        return float(2.0 * self.stationary_distribution()[UP] - 1.0)

    @property
    def single_mode(self) -> bool:
        """True when the binned polarization relaxes as the single exponential e^(-m / m_t1)."""
        if not np.isfinite(self.m_t1) or self.levels == 2:
            return True
        return self.topology == "uniform" and self.zero_rate_factor == 1.0

    def _jump(self, rng: np.random.Generator, current: np.ndarray) -> np.ndarray:
        cumulative = np.cumsum(self._destinations[current], axis=1)
        draws = rng.random(current.size)
        return np.minimum((draws[:, None] >= cumulative).sum(axis=1), self.levels - 1)

    def evolve(self, rng: np.random.Generator, start: np.ndarray, m: int) -> TelegraphPath:
        """
        Evolve spins through m readout repetitions.

        Args:
            rng: Generator owned by the calling shot.
            start: Initial level index of each spin.
            m: Number of repetitions.

        Returns:
            TelegraphPath with the level after the last repetition and the fraction of
            repetitions each spin was read in the bright level.
        """
        if m < 1:
            raise ValueError(f"m must be >= 1, got {m}")
        level = np.array(start, dtype=np.int64, copy=True)
        elapsed = np.zeros(level.size, dtype=np.int64)
        up_time = np.zeros(level.size, dtype=np.int64)
        pending = np.arange(level.size)

        while pending.size:
            current = level[pending]
            leave = self._leave[current]
            dwell = np.full(pending.size, _NEVER, dtype=np.int64)
            mobile = leave > 0
            if mobile.any():
                dwell[mobile] = rng.geometric(leave[mobile])
            remaining = m - elapsed[pending]
            stay = np.minimum(dwell, remaining)
            up_time[pending] += np.where(current == UP, stay, 0)
            elapsed[pending] += stay

            # a dwell equal to the remaining count still jumps after the last readout
            jumped = dwell <= remaining
            if jumped.any():
                movers = pending[jumped]
                level[movers] = self._jump(rng, level[movers])
            pending = pending[jumped & (elapsed[pending] < m)]

        return TelegraphPath(final_levels=level, up_fraction=up_time / float(m))
