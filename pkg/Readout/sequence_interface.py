"""
Readout Sequence Interface
Prepares the nuclear spin levels at the start of each simulated shot.
"""

from abc import ABC, abstractmethod

import numpy as np


class ReadoutSequence(ABC):
    """
    Abstract base class for the pulse sequences preceding a repetitive readout.
    """

    @abstractmethod
    def initialize(self, rng: np.random.Generator, n_spins: int, levels: int) -> np.ndarray:
        """
        Draw the level index of every spin for one shot.

        Args:
            rng: Generator owned by the shot.
            n_spins: Number of spins in the ensemble.
            levels: Number of levels of the species (2 or 3).

        Returns:
            Integer array of level indices, 0 being the bright level.
        """

    @abstractmethod
    def get_sequence_name(self) -> str:
        """Return the sequence name used in plans and reports."""
