"""
Dead-Time APD
Non-paralyzable dead time thinning the detected photons.
"""

import numpy as np

from .apd_model import ApdModel


class DeadTimeApd(ApdModel):
    """
    Non-paralyzable detector with dead time ``dead_time`` expressed in mean inter-photon
    intervals of the baseline rate. A window with x true photons reports
    x / (1 + dead_time * x / n0), where n0 is the batch baseline.
    """

    mode = "dead_time"

    def __init__(self, dead_time: float):
        if dead_time < 0:
            raise ValueError(f"dead_time must be non-negative, got {dead_time}")
        self.dead_time = float(dead_time)

    @property
    def k(self) -> float:
        # detected width shrinks by (1 + d)^-2 while the detected mean shrinks by (1 + d)^-1
        return float((1.0 + self.dead_time) ** -1.5)

    @classmethod
    def matched_to(cls, k: float) -> "DeadTimeApd":
        """Dead-time model whose calibrated k equals the given factor."""
        if not 0.0 < k <= 1.0:
            raise ValueError(f"k must be in (0, 1], got {k}")
        return cls(k ** (-2.0 / 3.0) - 1.0)

    def transform(self, counts: np.ndarray, reference_mean: float) -> np.ndarray:
        if self.dead_time == 0.0:
            return counts
        if reference_mean <= 0:
            raise ValueError("dead-time model needs a positive baseline")
        return counts / (1.0 + self.dead_time * counts / reference_mean)

    def to_dict(self):
        return {**super().to_dict(), "dead_time": self.dead_time}
