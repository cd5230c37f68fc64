"""
Multiplicative APD
Phenomenological width compression of every count column about its batch mean.
"""

import numpy as np

from .apd_model import ApdModel


class MultiplicativeApd(ApdModel):
    """
    Rescales fluctuations by a fixed factor k while preserving each column's mean.
    """

    mode = "multiplicative_k"

    def __init__(self, k: float):
        """
        Initialize MultiplicativeApd.

        Args:
            k: Compression factor in (0, 1].
        """
        if not 0.0 < k <= 1.0:
            raise ValueError(f"k must be in (0, 1], got {k}")
        self._k = float(k)

    @property
    def k(self) -> float:
        return self._k

    def transform(self, counts: np.ndarray, reference_mean: float) -> np.ndarray:
        mean = counts.mean()
        return mean + self._k * (counts - mean)
