"""
Mixture Fit
Maximum-likelihood fit of the equal-weight coherent-state fan (delta_phi, theta, a_therm) to a
set of measured marginals.
"""

from __future__ import annotations

import logging
import math
from typing import Sequence, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.special import xlogy
from tqdm import tqdm

from .dicke import twice_j
from .mixture import CoherentStateMixture, MarginalDistribution, binomial_log_pmf, marginal_of_mixture

logger = logging.getLogger(__name__)


def _observed_weights(marginals: Sequence[MarginalDistribution]) -> np.ndarray:
    """Per-axis expected counts, shape (axes, 2J + 1)."""
    return np.stack([marginal.counts * marginal.probabilities for marginal in marginals])


def mixture_log_likelihood(mixture: CoherentStateMixture, marginals: Sequence[MarginalDistribution]) -> float:
    """Multinomial log-likelihood of the marginals under ``mixture``."""
    total = 0.0
    for marginal in marginals:
        model = marginal_of_mixture(mixture, marginal.axis).probabilities
        total += float(xlogy(marginal.counts * marginal.probabilities, model).sum())
    return total


def is_identifiable(marginals: Sequence[MarginalDistribution]) -> bool:
    """At least two axes, one off the equator (typically Z) and one on it."""
    axes = [marginal.axis for marginal in marginals]
    return len(axes) >= 2 and any(not axis.is_equatorial for axis in axes) and any(axis.is_equatorial for axis in axes)


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _grid_log_likelihood(
    twice: int,
    directions: np.ndarray,
    weights: np.ndarray,
    delta_phis: np.ndarray,
    thetas: np.ndarray,
    a_therms: np.ndarray,
    n_components: int,
    center_phi: float,
    progress: bool,
) -> np.ndarray:
    """Log-likelihood on the full grid, shape (delta_phi, theta, a_therm)."""
    spread = np.linspace(-1.0, 1.0, n_components)
    phis = center_phi + delta_phis[:, None] * spread[None, :]  # (D, C)
    dimension = twice + 1
    table = np.empty((delta_phis.size, thetas.size, a_therms.size))
    for t_index, theta in enumerate(tqdm(thetas, desc="mixture grid", disable=not progress)):
        fan = np.stack(
            [math.sin(theta) * np.cos(phis), math.sin(theta) * np.sin(phis), np.full(phis.shape, math.cos(theta))],
            axis=-1,
        )  # (D, C, 3)
        cosines = fan @ directions.T  # (D, C, A)
        p = np.clip((1.0 + cosines) / 2.0, 0.0, 1.0)
        coherent = np.exp(binomial_log_pmf(twice, p)).mean(axis=1)  # (D, A, M)
        model = (1.0 - a_therms)[:, None, None, None] * coherent[None] + (a_therms / dimension)[:, None, None, None]
        table[:, t_index, :] = xlogy(weights[None, None], model).sum(axis=(2, 3)).T
    return table


def fit_mixture(
    marginals: Sequence[MarginalDistribution],
    n_components: int = 51,
    delta_phi_step_deg: float = 1.0,
    theta_range_deg: Tuple[float, float] = (45.0, 135.0),
    theta_step_deg: float = 1.0,
    a_therm_step: float = 0.01,
    refine: bool = True,
    progress: bool = False,
) -> CoherentStateMixture:
    """
    Grid search plus bounded local refinement of (delta_phi, theta, a_therm).

    The grid spans delta_phi in [0, 90] degrees, theta over ``theta_range_deg`` and a_therm in
    [0, 1]. Ties resolve to the smallest delta_phi, then the smallest |theta - 90|, then the
    smallest a_therm. Refinement (Nelder-Mead inside the grid box) only replaces the grid
    optimum when it raises the likelihood.

    Args:
        marginals: Measured marginals, one per axis, all in the same J block.
        n_components: Coherent states in the fan.
        delta_phi_step_deg: Grid step of the half-width in degrees.
        theta_range_deg: Polar range searched, in degrees.
        theta_step_deg: Grid step of theta in degrees.
        a_therm_step: Grid step of the thermal weight.
        refine: Polish the grid optimum.
        progress: Show a progress bar over theta.

    Returns:
        The best CoherentStateMixture; ``extra`` holds ``log_likelihood``, ``grid_log_likelihood``,
        ``identifiable`` and ``n_axes``.
    """
    if not marginals:
        raise ValueError("fit_mixture needs at least one marginal")
    dimension = marginals[0].probabilities.size
    if any(marginal.probabilities.size != dimension for marginal in marginals):
        raise ValueError("all marginals must belong to the same J block")
    if min(delta_phi_step_deg, theta_step_deg, a_therm_step) <= 0:
        raise ValueError("grid steps must be positive")
    j = (dimension - 1) / 2.0
    twice = twice_j(j)
    identifiable = is_identifiable(marginals)
    if not identifiable:
        logger.warning("marginals along %d axis(es) cannot pin theta and delta_phi together", len(marginals))

    center_phi = math.pi / 2.0
    delta_phis = np.radians(_grid(0.0, 90.0, delta_phi_step_deg))
    theta_lo, theta_hi = theta_range_deg
    thetas_deg = _grid(theta_lo, theta_hi, theta_step_deg)
    thetas_deg = thetas_deg[np.argsort(np.abs(thetas_deg - 90.0), kind="stable")]
    thetas = np.radians(thetas_deg)
    a_therms = np.minimum(_grid(0.0, 1.0, a_therm_step), 1.0)

    weights = _observed_weights(marginals)
    directions = np.stack([marginal.axis.direction for marginal in marginals])
    table = _grid_log_likelihood(
        twice, directions, weights, delta_phis, thetas, a_therms, n_components, center_phi, progress
    )
    best = np.unravel_index(int(np.argmax(table)), table.shape)
    start = np.array([delta_phis[best[0]], thetas[best[1]], a_therms[best[2]]])
    grid_best = float(table[best])
    logger.info(
        "grid optimum delta_phi=%.1f deg theta=%.1f deg a_therm=%.2f (logL=%.6g)",
        math.degrees(start[0]), math.degrees(start[1]), start[2], grid_best,
    )

    def build(params: np.ndarray) -> CoherentStateMixture:
        return CoherentStateMixture(
            j=j,
            delta_phi=float(params[0]),
            theta=float(params[1]),
            a_therm=float(params[2]),
            n_components=n_components,
            center_phi=center_phi,
        )

    params, log_likelihood = start, grid_best
    if refine:
        bounds = [(0.0, math.pi / 2.0), (math.radians(theta_lo), math.radians(theta_hi)), (0.0, 1.0)]

        def objective(x: np.ndarray) -> float:
            clipped = np.array([min(max(v, lo), hi) for v, (lo, hi) in zip(x, bounds)])
            value = mixture_log_likelihood(build(clipped), marginals)
            return -value if np.isfinite(value) else np.inf

        polished = minimize(objective, start, method="Nelder-Mead", bounds=bounds,
                            options={"xatol": 1e-6, "fatol": 1e-10, "maxiter": 2000})
        candidate = np.array([min(max(v, lo), hi) for v, (lo, hi) in zip(polished.x, bounds)])
        refined = -objective(candidate)
        if refined > grid_best:
            params, log_likelihood = candidate, refined
        logger.debug("refinement %s after %d evaluations", "accepted" if refined > grid_best else "rejected",
                     polished.nfev)

    fitted = build(params)
    fitted.extra.update(
        {
            "log_likelihood": log_likelihood,
            "grid_log_likelihood": grid_best,
            "identifiable": identifiable,
            "n_axes": len(marginals),
        }
    )
    return fitted
