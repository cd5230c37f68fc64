"""
Noise Decomposition
Turns readout batches into normalized widths, separates shot noise from projection noise,
calibrates the detector correction factor k and sweeps the shot-to-projection crossover.
"""

from __future__ import annotations

import logging
import math
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from tqdm import tqdm

from Ensemble import shot_noise_prime
from Readout import ReadoutBatch, ReadoutRecord, ReadoutSimulator, SimulationPlan

from .models import CrossoverCurve, CrossoverPoint, KCalibration, NoiseDecomposition

logger = logging.getLogger(__name__)

K_UPPER_BOUND = 1.1
# Error multiplier for k when every batch shares a single photon number.
SINGLE_N_ERROR_INFLATION = 3.0

Records = Union[ReadoutBatch, Iterable[ReadoutRecord]]


def _as_batch(records: Records) -> ReadoutBatch:
    if isinstance(records, ReadoutBatch):
        return records
    return ReadoutBatch.from_records(records)


def decompose(records: Records, k: float = 1.0, contrast: Optional[float] = None) -> NoiseDecomposition:
    """
    Decompose the width of b - a into shot and projection contributions.

    Args:
        records: Batch or iterable of records sharing one repetition count.
        k: Detector width-compression factor.
        contrast: Known contrast; estimated as 2 - <a + b> / n when omitted.

    Returns:
        NoiseDecomposition with chi-distribution error bars.

    Raises:
        ValueError: With fewer than two records, a non-positive baseline or contrast.
    """
    batch = _as_batch(records)
    size = len(batch)
    if size < 2:
        raise ValueError("need at least two records")
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")

    n = float(np.mean(batch.baseline))
    if n <= 0:
        raise ValueError("mean baseline photon count must be positive")
    c = float(contrast) if contrast is not None else 2.0 - float(np.mean(batch.a + batch.b)) / n
    if c <= 0:
        raise ValueError(f"contrast must be positive, got {c:.4g}; supply it explicitly")

    sigma_total = float(np.std(batch.signal, ddof=1))
    degenerate = sigma_total == 0.0
    sigma_prime = sigma_total / (2.0 * n * c)
    sigma_prime_err = math.nan if degenerate else sigma_prime / math.sqrt(2.0 * (size - 1))
    shot = float(shot_noise_prime(n, c))

    excess = (sigma_prime / k) ** 2 - shot**2
    clipped = excess < 0
    sigma_proj = math.sqrt(max(excess, 0.0))
    if degenerate or sigma_proj == 0.0:
        sigma_proj_err = math.nan
    else:
        sigma_proj_err = sigma_prime / k**2 / sigma_proj * sigma_prime_err

    if clipped:
        logger.debug("variance excess clipped at n=%.1f (sigma'=%.4g, shot'=%.4g)", n, sigma_prime, shot)

    return NoiseDecomposition(
        n=n,
        c=c,
        records=size,
        sigma_total=sigma_total,
        sigma_prime=sigma_prime,
        sigma_prime_err=sigma_prime_err,
        sigma_shot_prime=shot,
        sigma_proj=sigma_proj,
        sigma_proj_err=sigma_proj_err,
        k=k,
        clipped=clipped,
        degenerate=degenerate,
    )


def calibrate_k(batches: Sequence[Records]) -> KCalibration:
    """
    Fit sigma(r1 - r2) / n = k sqrt(2 / n) by weighted least squares through the origin.

    Args:
        batches: One batch per photon number.

    Returns:
        KCalibration with the estimate and its standard error.
    """
    xs, ys, weights = [], [], []
    for records in batches:
        batch = _as_batch(records)
        if len(batch) < 2:
            raise ValueError("each batch needs at least two records")
        n = float(np.mean(batch.baseline))
        width = float(np.std(batch.r1 - batch.r2, ddof=1))
        ratio = width / n
        ratio_err = ratio / math.sqrt(2.0 * (len(batch) - 1))
        if ratio_err == 0:
            raise ValueError("reference channels show no fluctuation")
        xs.append(math.sqrt(2.0 / n))
        ys.append(ratio)
        weights.append(1.0 / ratio_err**2)
    if not xs:
        raise ValueError("no batches given")

    x, y, w = np.asarray(xs), np.asarray(ys), np.asarray(weights)
    normal = float(np.sum(w * x * x))
    k = float(np.sum(w * x * y)) / normal
    err = 1.0 / math.sqrt(normal)

    single_n = len(np.unique(np.round(x, 12))) < 2
    if single_n:
        err *= SINGLE_N_ERROR_INFLATION
        logger.warning("k calibrated from a single photon number; error inflated")
    at_bound = k > K_UPPER_BOUND
    return KCalibration(k=min(k, K_UPPER_BOUND), err=err, points=len(xs), single_n=single_n, at_bound=at_bound)


def sweep_crossover(
    simulator: ReadoutSimulator,
    plan: SimulationPlan,
    m_values: Sequence[int],
    k: float = 1.0,
    estimate_contrast: bool = False,
    progress: bool = False,
) -> CrossoverCurve:
    """
    Simulate and decompose one batch per repetition count.

    Args:
        simulator: Simulator running the shots.
        plan: Base plan; m is replaced per point.
        m_values: Strictly ascending repetition counts.
        k: Correction factor used for the decomposition.
        estimate_contrast: Estimate c from the data instead of using the configured value.
        progress: Show a tqdm bar over the sweep.

    Returns:
        CrossoverCurve of sigma_prime against n.
    """
    values = [int(m) for m in m_values]
    if not values or any(later <= earlier for earlier, later in zip(values, values[1:])):
        raise ValueError("m_values must be non-empty and strictly ascending")

    contrast = None if estimate_contrast else plan.cfg.contrast
    points = []
    for index, m in enumerate(tqdm(values, desc="crossover", disable=not progress)):
        batch = simulator.simulate_experiment(plan.model_copy(update={"m": m}), point=index)
        decomposition = decompose(batch, k=k, contrast=contrast)
        points.append(
            CrossoverPoint(
                m=m,
                n=decomposition.n,
                sigma_prime=decomposition.sigma_prime,
                err=decomposition.sigma_prime_err,
                decomposition=decomposition,
            )
        )
        logger.info("m=%d n=%.1f sigma'=%.5f gap=%.2f dB", m, decomposition.n, decomposition.sigma_prime,
                    decomposition.db_gap)
    return CrossoverCurve(points=points)
