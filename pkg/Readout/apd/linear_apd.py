"""
Linear APD
Ideal detector: counts pass through unchanged.
"""

import numpy as np

from .apd_model import ApdModel


class LinearApd(ApdModel):
    """Detector in its linear regime."""

    mode = "linear"

    @property
    def k(self) -> float:
        return 1.0

    def transform(self, counts: np.ndarray, reference_mean: float) -> np.ndarray:
        return counts
