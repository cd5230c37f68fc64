"""
Deconvolution
Maximum-likelihood recovery of the spin marginal hidden under the photon shot noise of a
histogram of normalized signals (b - a) / (2 n c).
"""

from __future__ import annotations

import logging
from typing import Literal, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike
from scipy.stats import binom, norm, skellam

from Ensemble import shot_noise_prime
from Spectroscopy import ReadoutAxis

from .mixture import MarginalDistribution

logger = logging.getLogger(__name__)

KernelKind = Literal["auto", "skellam", "gaussian"]

# Beyond this many photons the Skellam cdf is replaced by its Gaussian limit
SKELLAM_PHOTON_LIMIT = 1e7
_TINY = np.finfo(float).tiny


def state_centers(n_spins: int, k: float = 1.0) -> np.ndarray:
    """Mean normalized signal k m / N of every binned state m = -N/2 .. N/2."""
    m = np.arange(n_spins + 1) - n_spins / 2.0
    return k * m / n_spins


def skellam_kernel(edges: ArrayLike, n: float, contrast: float, n_spins: int, k: float = 1.0) -> np.ndarray:
    """
    P(signal in bin i | state j) for the exact photon difference b - a.

    State j brightens window b to mean n (1 - c (1 - f)) and darkens window a to n (1 - c f)
    with f = 1/2 + k m / N. Bin [lo, hi) covers the integers d in [2nc lo, 2nc hi); the last
    bin is closed like ``numpy.histogram``.
    """
    edges = np.asarray(edges, dtype=float)
    f_up = 0.5 + state_centers(n_spins, k)
    mu_b = n * (1.0 - contrast * (1.0 - f_up))
    mu_a = n * (1.0 - contrast * f_up)
    scaled = 2.0 * n * contrast * edges
    upper = np.ceil(scaled) - 1.0
    upper[-1] = np.floor(scaled[-1])
    cdf = skellam.cdf(upper[:, None], mu_b[None, :], mu_a[None, :])
    return np.clip(np.diff(cdf, axis=0), 0.0, None)


def gaussian_kernel(edges: ArrayLike, centers: ArrayLike, width: float) -> np.ndarray:
    """P(signal in bin i | state j) for a normal law of fixed width around each center."""
    edges = np.asarray(edges, dtype=float)
    centers = np.asarray(centers, dtype=float)
    cdf = norm.cdf((edges[:, None] - centers[None, :]) / width)
    return np.clip(np.diff(cdf, axis=0), 0.0, None)


def _log_likelihood(counts: np.ndarray, kernel: np.ndarray, column_mass: np.ndarray, x: np.ndarray) -> float:
    predicted = kernel @ x
    inside = float(column_mass @ x)
    mask = counts > 0
    return float(counts[mask] @ np.log(np.maximum(predicted[mask], _TINY) / inside))


def richardson_lucy(
    counts: ArrayLike, kernel: ArrayLike, max_iter: int = 5000, tol: float = 1e-8
) -> Tuple[np.ndarray, int, bool]:
    """
    Expectation-maximization for histogram counts y = K x with x on the simplex.

    Each update multiplies x by K^T (y / K x) divided by the column sums of K, then
    renormalizes, so mass leaving the histogram range does not bias the estimate. Stops when
    the log-likelihood changes by less than ``tol`` relative to its magnitude.

    Returns:
        (x, iterations, converged)
    """
    counts = np.asarray(counts, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    column_mass = kernel.sum(axis=0)
    visible = column_mass > 0
    x = np.where(visible, 1.0, 0.0)
    x /= x.sum()
    previous = _log_likelihood(counts, kernel, column_mass, x)
    for iteration in range(1, max_iter + 1):
        predicted = kernel @ x
        ratio = np.divide(counts, predicted, out=np.zeros_like(counts), where=predicted > 0)
        update = kernel.T @ ratio
        x = np.where(visible, x * update / np.where(visible, column_mass, 1.0), 0.0)
        x /= x.sum()
        current = _log_likelihood(counts, kernel, column_mass, x)
        if abs(current - previous) <= tol * max(abs(current), 1e-300):
            return x, iteration, True
        previous = current
    return x, max_iter, False


def deconvolve_skellam(
    counts: ArrayLike,
    edges: ArrayLike,
    n: float,
    contrast: float,
    n_spins: int,
    k: float = 1.0,
    axis: Optional[ReadoutAxis] = None,
    max_iter: int = 5000,
    tol: float = 1e-8,
    rabi_borders: Optional[Tuple[float, float]] = None,
    kernel: KernelKind = "auto",
) -> MarginalDistribution:
    """
    Recover the binned spin marginal from a histogram of normalized signals.

    Args:
        counts: Histogram counts.
        edges: Histogram edges, one more than counts.
        n: Baseline photons per window.
        contrast: Optical contrast c.
        n_spins: Number of spins N; the marginal covers m = -N/2 .. N/2.
        k: Signal scale; state m sits at k m / N.
        axis: Axis the histogram was measured along (Z if omitted).
        max_iter: Iteration cap.
        tol: Relative log-likelihood tolerance.
        rabi_borders: Signal values (lower, upper) of the fully dark and fully bright ensemble
            from a Rabi measurement. When given, the signal axis is mapped affinely so the
            borders land on -1/2 and +1/2 and the Gaussian kernel is used.
        kernel: ``skellam``, ``gaussian`` or ``auto`` (Skellam unless the photon count is huge
            or the axis has been rescaled).

    Returns:
        MarginalDistribution over m; flagged ``low_confidence`` and uniform when the photon
        noise is wider than the histogram.
    """
    counts = np.asarray(counts, dtype=float)
    edges = np.asarray(edges, dtype=float)
    if counts.ndim != 1 or edges.shape != (counts.size + 1,):
        raise ValueError("edges must have exactly one more entry than counts")
    if np.any(counts < 0) or counts.sum() <= 0:
        raise ValueError("histogram must be non-empty with non-negative counts")
    if np.any(np.diff(edges) <= 0):
        raise ValueError("histogram edges must be strictly increasing")
    if n_spins < 1:
        raise ValueError(f"n_spins must be positive, got {n_spins}")
    if not 0.0 < contrast < 1.0:
        raise ValueError(f"contrast must be in (0, 1), got {contrast}")
    if kernel not in ("auto", "skellam", "gaussian"):
        raise ValueError(f"unknown kernel: {kernel}")

    axis = axis or ReadoutAxis.z()
    width = float(shot_noise_prime(n, contrast))
    if rabi_borders is not None:
        lower, upper = rabi_borders
        if upper <= lower:
            raise ValueError(f"rabi borders must be increasing, got {rabi_borders}")
        edges = (edges - 0.5 * (lower + upper)) / (upper - lower)
        width /= upper - lower
        if kernel == "skellam":
            raise ValueError("the Skellam kernel needs the raw photon axis; drop rabi_borders or use gaussian")
        kernel = "gaussian"
    elif kernel == "auto":
        kernel = "gaussian" if n > SKELLAM_PHOTON_LIMIT else "skellam"

    total = float(counts.sum())
    dimension = n_spins + 1
    if width > edges[-1] - edges[0]:
        logger.warning("photon noise %.3g wider than histogram support %.3g; returning flat marginal",
                       width, edges[-1] - edges[0])
        return MarginalDistribution(
            axis=axis, probabilities=np.full(dimension, 1.0 / dimension), counts=total, low_confidence=True
        )

    if kernel == "skellam":
        matrix = skellam_kernel(edges, n, contrast, n_spins, k)
    else:
        matrix = gaussian_kernel(edges, state_centers(n_spins, k), width)

    probabilities, iterations, converged = richardson_lucy(counts, matrix, max_iter=max_iter, tol=tol)
    if not converged:
        logger.warning("deconvolution along %s stopped at the iteration cap (%d)", axis.name, max_iter)
    logger.debug("deconvolved %s with %s kernel in %d iterations", axis.name, kernel, iterations)
    return MarginalDistribution(axis=axis, probabilities=probabilities, counts=total, iterations=iterations)


def thermal_marginal(n_spins: int, p_up: float = 1.0 / 3.0) -> np.ndarray:
    """Binomial(N, p_up) over the binned states, the marginal of an unpolarized nitrogen ensemble."""
    return binom.pmf(np.arange(n_spins + 1), n_spins, p_up)
