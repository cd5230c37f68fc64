"""
Linear Fits
Emission-rate regression, the geometric emitter-count estimate and the tomography width scale.
"""

from __future__ import annotations

import logging
import math
from typing import Literal, NamedTuple, Sequence, Tuple

import numpy as np
from scipy import stats

from .fit_result import FitResult

logger = logging.getLogger(__name__)

# Diamond, atoms per nm^3 (1.76e23 cm^-3)
CARBON_DENSITY_PER_NM3 = 176.0

SpotModel = Literal["airy_fwhm", "literal"]


class GeometricEstimate(NamedTuple):
    n_nitrogen: float
    n_nv: float
    spot_diameter_nm: float


def fit_emission_linear(points: Sequence[Tuple[float, float]]) -> FitResult:
    """
    Ordinary least squares rate = slope * n_nv + intercept.

    Args:
        points: (n_nv, rate) pairs, rate in any unit (kcps in the lab files).

    Returns:
        FitResult with ``slope`` and ``intercept``. Errors are NaN with only two points.

    Raises:
        ValueError: With fewer than two points or all n_nv equal.
    """
    rows = np.asarray(points, dtype=float)
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise ValueError("emission fit needs at least two (n_nv, rate) points")
    x, y = rows[:, 0], rows[:, 1]
    if np.ptp(x) == 0:
        raise ValueError("emission fit is underdetermined: all emitter counts are equal")

    regression = stats.linregress(x, y)
    residual = y - (regression.slope * x + regression.intercept)
    if x.size > 2:
        slope_err = float(regression.stderr)
        intercept_err = float(regression.intercept_stderr)
    else:
        slope_err = intercept_err = math.nan
    cross = -float(np.mean(x)) * slope_err**2
    covariance = np.array([[slope_err**2, cross], [cross, intercept_err**2]])

    return FitResult(
        names=("slope", "intercept"),
        params={"slope": float(regression.slope), "intercept": float(regression.intercept)},
        errors={"slope": slope_err, "intercept": intercept_err},
        covariance=covariance,
        residual_norm=float(np.linalg.norm(residual)),
        converged=True,
        iterations=1,
        identifiable={"slope": True, "intercept": True},
        message=f"r={regression.rvalue:.6f}",
    )


def geometric_nv_estimate(
    wavelength_nm: float = 532.0,
    numerical_aperture: float = 1.35,
    layer_thickness_nm: float = 277.0,
    nitrogen_density_ppm: float = 11.0,
    conversion_rate: float = 0.003,
    spot: SpotModel = "airy_fwhm",
) -> GeometricEstimate:
    """
    Emitters inside a cylinder of the confocal spot area and the doped layer thickness.

    ``airy_fwhm`` takes the spot diameter as 0.84 wavelength / NA; ``literal`` divides by
    0.84 NA instead and gives a spot about 1.42 times wider.
    """
    for name, value in (
        ("wavelength_nm", wavelength_nm),
        ("numerical_aperture", numerical_aperture),
        ("layer_thickness_nm", layer_thickness_nm),
        ("nitrogen_density_ppm", nitrogen_density_ppm),
    ):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
    if conversion_rate < 0:
        raise ValueError(f"conversion_rate must be non-negative, got {conversion_rate}")

    if spot == "airy_fwhm":
        diameter = 0.84 * wavelength_nm / numerical_aperture
    elif spot == "literal":
        diameter = wavelength_nm / (0.84 * numerical_aperture)
    else:
        raise ValueError(f"unknown spot model: {spot}")

    volume = math.pi * (diameter / 2.0) ** 2 * layer_thickness_nm
    n_nitrogen = volume * CARBON_DENSITY_PER_NM3 * nitrogen_density_ppm * 1e-6
    return GeometricEstimate(n_nitrogen=n_nitrogen, n_nv=n_nitrogen * conversion_rate, spot_diameter_nm=diameter)


def fit_tomography_scale(observations: Sequence[Sequence[float]]) -> FitResult:
    """
    Least-squares k1 in sigma'^2 = shot'^2 + k1 sigma_model^2.

    Args:
        observations: (sigma_prime, sigma_shot_prime, sigma_model[, sigma_prime_err]) rows.
            Rows with an error are inverse-variance weighted; otherwise the residual
            scatter sets the error.

    Returns:
        FitResult with the single parameter ``k1``.
    """
    rows = np.asarray(observations, dtype=float)
    if rows.ndim != 2 or rows.shape[1] < 3 or rows.shape[0] < 1:
        raise ValueError("need (sigma_prime, sigma_shot_prime, sigma_model) rows")
    sigma_prime, shot, model = rows[:, 0], rows[:, 1], rows[:, 2]
    x = np.square(model)
    y = np.square(sigma_prime) - np.square(shot)
    if not np.any(x > 0):
        raise ValueError("model widths are all zero; k1 is undetermined")

    weighted = rows.shape[1] > 3 and np.all(rows[:, 3] > 0)
    w = 1.0 / np.square(2.0 * sigma_prime * rows[:, 3]) if weighted else np.ones_like(x)
    normal = float(np.sum(w * x * x))
    k1 = float(np.sum(w * x * y)) / normal
    residual = y - k1 * x
    if weighted:
        variance = 1.0 / normal
    else:
        dof = max(x.size - 1, 1)
        variance = float(np.sum(residual**2)) / dof / normal
    logger.debug("tomography scale k1=%.4f from %d axes", k1, x.size)
    return FitResult(
        names=("k1",),
        params={"k1": k1},
        errors={"k1": math.sqrt(variance)},
        covariance=np.array([[variance]]),
        residual_norm=float(np.linalg.norm(residual * np.sqrt(w))),
        converged=True,
        iterations=1,
        identifiable={"k1": x.size > 1 or weighted},
    )
