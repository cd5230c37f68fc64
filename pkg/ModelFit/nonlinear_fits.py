"""
Nonlinear Fits
Bounded trust-region least squares for the crossover model and the polarization decay.

Positive scale parameters are fitted in log space. Standard errors come from the
Gauss-Newton covariance (J^T J)^-1 of the weighted residuals, propagated to natural units
by the delta method.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import least_squares

from Ensemble import (
    BINNED_STEADY_STATE,
    SpinSpecies,
    binning_factor,
    polarization_under_readout,
    projection_noise_model,
    shot_noise_prime,
    thermal_sigma0,
)
from NoiseAnalysis import CrossoverCurve

from .fit_result import FitResult

logger = logging.getLogger(__name__)

K_BOUNDS = (1e-3, 1.1)
N_NV_BOUNDS = (1.0, 1e8)
N_T1_BOUNDS = (1.0, 1e13)
# A log-space standard deviation above this spans more than a factor e.
LOG_SD_LIMIT = 1.0
_RCOND = 1e-12


def crossover_model(
    n: ArrayLike, n_nv: float, n_t1: float, k: float, contrast: float, species: Optional[SpinSpecies] = None
) -> np.ndarray:
    """Normalized width k sqrt(shot'(n)^2 + projection(n)^2) of the crossover."""
    n = np.asarray(n, dtype=float)
    projection = projection_noise_model(n_nv, n, n_t1, species)
    return k * np.hypot(shot_noise_prime(n, contrast), projection)


@dataclass(frozen=True)
class CrossoverModel:
    """Crossover fit with free (n_nv, n_t1, k) and fixed species and contrast."""

    contrast: float
    species: SpinSpecies = field(default_factory=SpinSpecies.nitrogen14)

    def evaluate(self, n: ArrayLike, n_nv: float, n_t1: float, k: float) -> np.ndarray:
        return crossover_model(n, n_nv, n_t1, k, self.contrast, self.species)


def _covariance(jac: np.ndarray, scale: float) -> Tuple[np.ndarray, np.ndarray]:
    """Covariance from the Jacobian; directions the data cannot see get infinite variance."""
    normal = jac.T @ jac
    eigenvalues, vectors = np.linalg.eigh(normal)
    top = eigenvalues.max() if eigenvalues.size else 0.0
    blind = eigenvalues <= _RCOND * max(top, 0.0)
    inverse = np.where(blind, 0.0, 1.0 / np.where(blind, 1.0, eigenvalues))
    cov = (vectors * inverse) @ vectors.T * scale
    cov = (cov + cov.T) / 2.0
    unseen = np.any(np.abs(vectors[:, blind]) > 0.1, axis=1) if blind.any() else np.zeros(len(normal), bool)
    cov[unseen, :] = np.inf
    cov[:, unseen] = np.inf
    return cov, unseen


def _weights(err: Optional[ArrayLike], size: int) -> Tuple[np.ndarray, bool]:
    if err is None:
        return np.ones(size), False
    err = np.asarray(err, dtype=float)
    if err.shape != (size,) or not np.all(np.isfinite(err)) or np.any(err <= 0):
        return np.ones(size), False
    return err, True


def _finish(
    names: Tuple[str, ...],
    result,
    log_params: Sequence[bool],
    weighted: bool,
    message: str = "",
) -> FitResult:
    theta = result.x
    dof = max(result.fun.size - theta.size, 1)
    scale = 1.0 if weighted else 2.0 * result.cost / dof
    cov_theta, unseen = _covariance(result.jac, scale)
    sd_theta = np.sqrt(np.clip(np.diag(cov_theta), 0.0, None))

    values = np.array([math.exp(t) if log else t for t, log in zip(theta, log_params)])
    jacobian = np.where(log_params, values, 1.0)
    with np.errstate(invalid="ignore"):
        cov = cov_theta * np.outer(jacobian, jacobian)
    cov[np.isnan(cov)] = np.inf
    errors = np.abs(jacobian) * sd_theta

    at_bound = np.asarray(result.active_mask) != 0
    identifiable = {}
    for index, name in enumerate(names):
        spread_ok = sd_theta[index] <= LOG_SD_LIMIT if log_params[index] else np.isfinite(sd_theta[index])
        identifiable[name] = bool(spread_ok and not at_bound[index] and not unseen[index])

    fit = FitResult(
        names=names,
        params={name: float(v) for name, v in zip(names, values)},
        errors={name: float(e) for name, e in zip(names, errors)},
        covariance=cov,
        residual_norm=float(np.linalg.norm(result.fun)),
        converged=bool(result.success),
        iterations=int(result.nfev),
        identifiable=identifiable,
        message=message or str(result.message),
    )
    if not fit.all_identifiable:
        logger.warning("fit parameters not identifiable: %s",
                       [name for name, ok in identifiable.items() if not ok])
    return fit


def fit_crossover(
    curve: CrossoverCurve,
    fixed: CrossoverModel,
    x0: Optional[Tuple[float, float, float]] = None,
    max_nfev: int = 500,
) -> FitResult:
    """
    Fit (n_nv, n_t1, k) to a crossover curve.

    Args:
        curve: Normalized widths against photon number, with standard errors.
        fixed: Species and contrast held fixed.
        x0: Optional starting (n_nv, n_t1, k).
        max_nfev: Cap on model evaluations.

    Returns:
        FitResult with parameters ``n_nv``, ``n_t1`` and ``k``.

    Raises:
        ValueError: With fewer than four points.
    """
    if len(curve.points) < 4:
        raise ValueError("crossover fit needs at least four points")
    n = np.array([point.n for point in curve.points])
    y = np.array([point.sigma_prime for point in curve.points])
    err, weighted = _weights([point.err for point in curve.points], n.size)

    if x0 is None:
        shot = np.asarray(shot_noise_prime(n, fixed.contrast))
        k0 = float(np.clip(y[0] / shot[0], 0.5, 1.05))
        excess = max((y[-1] / k0) ** 2 - shot[-1] ** 2, 1e-8)
        single = binning_factor(fixed.species) * thermal_sigma0(fixed.species, 1.0)
        x0 = (single**2 / excess, 100.0 * n.max(), k0)
    lower = np.array([math.log(N_NV_BOUNDS[0]), math.log(N_T1_BOUNDS[0]), K_BOUNDS[0]])
    upper = np.array([math.log(N_NV_BOUNDS[1]), math.log(N_T1_BOUNDS[1]), K_BOUNDS[1]])
    start = np.array([math.log(max(x0[0], 1.0)), math.log(max(x0[1], 1.0)), x0[2]])
    start = np.clip(start, lower + 1e-6, upper - 1e-6)

    def residuals(theta: np.ndarray) -> np.ndarray:
        model = fixed.evaluate(n, math.exp(theta[0]), math.exp(theta[1]), theta[2])
        return (model - y) / err

    result = least_squares(residuals, start, bounds=(lower, upper), method="trf", x_scale="jac", max_nfev=max_nfev)
    logger.info("crossover fit: status=%d nfev=%d cost=%.4g", result.status, result.nfev, result.cost)
    return _finish(("n_nv", "n_t1", "k"), result, (True, True, False), weighted)


def fit_polarization_decay(
    data: Sequence[Tuple[float, float, float]],
    p_ss: float = BINNED_STEADY_STATE,
    m_t1_upper: float = 1e9,
    max_nfev: int = 500,
) -> FitResult:
    """
    Fit p0 and m_t1 of the averaged polarization decay with p_ss fixed.

    Args:
        data: (m, p_obs, err) triples; err may be zero or NaN for an unweighted fit.
        p_ss: Steady-state polarization.
        m_t1_upper: Upper bound on m_t1.

    Returns:
        FitResult with parameters ``p0`` and ``m_t1``.
    """
    rows = np.asarray(data, dtype=float)
    if rows.ndim != 2 or rows.shape[0] < 3 or rows.shape[1] < 2:
        raise ValueError("polarization decay fit needs at least three (m, p_obs, err) points")
    rows = rows[np.argsort(rows[:, 0], kind="stable")]
    m, p_obs = rows[:, 0], rows[:, 1]
    err, weighted = _weights(rows[:, 2] if rows.shape[1] > 2 else None, m.size)

    p0_start = float(np.clip((p_obs[0] - p_ss) / (1.0 - p_ss), -1.4, 1.4))
    lower = np.array([-1.5, 0.0])
    upper = np.array([1.5, math.log(m_t1_upper)])
    start = np.clip(np.array([p0_start, math.log(max(float(np.median(m)), 1.0))]), lower + 1e-6, upper - 1e-6)

    def residuals(theta: np.ndarray) -> np.ndarray:
        return (polarization_under_readout(theta[0], m, math.exp(theta[1]), p_ss) - p_obs) / err

    result = least_squares(residuals, start, bounds=(lower, upper), method="trf", x_scale="jac", max_nfev=max_nfev)
    return _finish(("p0", "m_t1"), result, (False, True), weighted)
