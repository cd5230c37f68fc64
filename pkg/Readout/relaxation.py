"""
Relaxation Statistics
Continuous-time telegraph Monte Carlo of a relaxing spin-1/2 ensemble.

Provides the reference values for the instantaneous and time-averaged expectation and
projection noise of a polarized ensemble that relaxes during readout.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)


def simulate_relaxation_statistics(
    p: float,
    t1: float,
    times: Sequence[float],
    spins: int = 100,
    shots: int = 2000,
    seed: int = 0,
) -> pd.DataFrame:
    """
    Simulate spin-1/2 telegraph processes with correlation time t1.

    Each spin starts at +1/2 with probability (1 + p) / 2 and flips at rate 1 / (2 t1), so
    its autocorrelation decays as exp(-tau / t1). Flip times are exact; time averages are
    integrated piecewise between flips.

    Args:
        p: Initial polarization.
        t1: Relaxation time.
        times: Evaluation times (instantaneous) and integration lengths (time-averaged).
        spins: Spins per ensemble.
        shots: Independent ensembles.
        seed: Random seed.

    Returns:
        DataFrame with one row per time: the mean and standard deviation over shots of the
        per-spin collective spin, for both averaging modes, with their standard errors.
    """
    if not -1.0 <= p <= 1.0:
        raise ValueError(f"polarization must be in [-1, 1], got {p}")
    times = np.asarray(times, dtype=float)
    if times.size == 0 or np.any(times < 0):
        raise ValueError("times must be non-empty and non-negative")
    if shots < 2:
        raise ValueError("need at least two shots")

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    start = np.where(rng.random((shots, spins)) < (1.0 + p) / 2.0, 0.5, -0.5)

    horizon = float(times.max())
    flips = rng.poisson(horizon / (2.0 * t1), size=(shots, spins))
    width = max(int(flips.max()), 1)
    flip_times = rng.uniform(0.0, horizon, size=(shots, spins, width))
    flip_times[np.arange(width) >= flips[..., None]] = np.inf
    flip_times.sort(axis=-1)

    zeros = np.zeros((shots, spins, 1))
    never = np.full((shots, spins, 1), np.inf)
    boundaries = np.concatenate([zeros, flip_times, never], axis=-1)
    signs = (-1.0) ** np.arange(width + 1)

    rows = []
    for T in times:
        parity = (flip_times <= T).sum(axis=-1) % 2
        instantaneous = (start * np.where(parity == 0, 1.0, -1.0)).mean(axis=1)
        if T > 0:
            segments = np.diff(np.minimum(boundaries, T), axis=-1)
            averaged = (start * (segments * signs).sum(axis=-1) / T).mean(axis=1)
        else:
            averaged = start.mean(axis=1)
        rows.append(
            {
                "time": float(T),
                **_summary("instantaneous", instantaneous),
                **_summary("time_averaged", averaged),
            }
        )
    logger.debug("relaxation Monte Carlo: %d shots x %d spins, %d times", shots, spins, times.size)
    return pd.DataFrame(rows)


def _summary(prefix: str, values: np.ndarray) -> dict:
    sigma = float(values.std(ddof=1))
    return {
        f"mean_{prefix}": float(values.mean()),
        f"mean_{prefix}_err": sigma / np.sqrt(values.size),
        f"sigma_{prefix}": sigma,
        f"sigma_{prefix}_err": sigma / np.sqrt(2.0 * (values.size - 1)),
    }
