"""
APD Model Abstract Base Class
Defines the interface for detector response models.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Dict

import numpy as np

from ..models import COUNT_COLUMNS, ApdSettings, ReadoutBatch


class ApdModel(ABC):
    """
    Abstract base class for avalanche-photodiode response models.
    A model maps the true photon counts of a batch onto detected counts.
    """

    mode: str = ""

    @property
    @abstractmethod
    def k(self) -> float:
        """
        Width-compression factor seen by the shot-noise calibration.

        Returns:
            Ratio of the detected reference-difference width to the Skellam width at the
            detected mean count.
        """

    @abstractmethod
    def transform(self, counts: np.ndarray, reference_mean: float) -> np.ndarray:
        """
        Map one count column onto detected counts.

        Args:
            counts: True counts of one window across all shots.
            reference_mean: Mean baseline count of the batch.
        """

    def apply(self, batch: ReadoutBatch) -> ReadoutBatch:
        """Apply the detector response to every count column of a batch."""
        reference_mean = float(np.mean(batch.baseline))
        return batch.with_counts(
            **{name: self.transform(np.asarray(getattr(batch, name), dtype=float), reference_mean)
               for name in COUNT_COLUMNS}
        )

    def to_dict(self) -> Dict:
        return {"mode": self.mode, "k": self.k}

    @staticmethod
    def create(settings: ApdSettings) -> "ApdModel":
        """
        Factory method building the concrete model named by ``settings.mode``.
        """
        from .dead_time_apd import DeadTimeApd
        from .linear_apd import LinearApd
        from .multiplicative_apd import MultiplicativeApd

        if settings.mode == "linear":
            return LinearApd()
        if settings.mode == "multiplicative_k":
            return MultiplicativeApd(settings.k)
        if settings.mode == "dead_time":
            return DeadTimeApd(settings.dead_time)
        raise ValueError(f"unknown APD mode: {settings.mode}")
