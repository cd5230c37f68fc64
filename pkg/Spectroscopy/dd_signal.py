"""
DD Signal
Phase accumulated by a spin under an XY8 train in a random-phase AC field, and the Bessel
moments of the resulting equatorial distribution.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import j0

from .models import GAMMA_E, AcSignal, DdSequence, InteractionStrength, SincConvention

FloatOrArray = Union[float, np.ndarray]

_MICROSECOND = 1e-6


class MarginalMoments(NamedTuple):
    mean_x: FloatOrArray
    mean_y: FloatOrArray
    sigma_x: FloatOrArray
    sigma_y: FloatOrArray


class EnsembleMoments(NamedTuple):
    mean_x: FloatOrArray
    mean_y: FloatOrArray
    mean_z: FloatOrArray
    sigma_x: FloatOrArray
    sigma_y: FloatOrArray
    sigma_z: FloatOrArray


def _out(values: np.ndarray) -> FloatOrArray:
    return float(values) if np.ndim(values) == 0 else values


def detuning_response(
    tau: ArrayLike, tau0: float, n_pulses: int, convention: SincConvention = SincConvention.LITERAL
) -> FloatOrArray:
    """
    sinc(x) = sin(x) / x factor of the detuned interaction strength.

    Args:
        tau: Inter-pulse spacing(s) in seconds.
        tau0: Resonant spacing in seconds.
        n_pulses: Pulse count.
        convention: Which spacing multiplies the detuning inside the argument.

    Returns:
        Factor in [-0.22, 1], equal to 1 on resonance.
    """
    tau_us = np.asarray(tau, dtype=float) / _MICROSECOND
    tau0_us = tau0 / _MICROSECOND
    detuning = tau_us - tau0_us
    convention = SincConvention(convention)
    if convention is SincConvention.LITERAL:
        x = detuning * n_pulses * tau_us * math.pi
    elif convention is SincConvention.RESONANT_SPACING:
        x = detuning * n_pulses * tau0_us * math.pi
    else:
        x = detuning * n_pulses * math.pi / (2.0 * tau0_us)
    # numpy's sinc carries the pi inside
    return _out(np.sinc(x / math.pi))


def interaction_strength(
    seq: DdSequence, signal: AcSignal, convention: SincConvention = SincConvention.LITERAL
) -> InteractionStrength:
    """alpha = 2 pi (2 / pi) B_osc gamma_e tau_sens and its detuned value alpha'."""
    alpha = 4.0 * signal.b_osc * GAMMA_E * seq.tau_sens
    response = detuning_response(seq.tau, signal.tau0, seq.n_pulses, convention)
    return InteractionStrength(alpha=alpha, alpha_prime=alpha * float(response))


def accumulated_phase(
    seq: DdSequence,
    signal: AcSignal,
    lam: ArrayLike,
    convention: SincConvention = SincConvention.LITERAL,
) -> FloatOrArray:
    """Phase alpha' sin(lambda) picked up by a spin initialized along +Y."""
    strength = interaction_strength(seq, signal, convention)
    return _out(strength.alpha_prime * np.sin(np.asarray(lam, dtype=float)))


def marginal_moments(alpha_prime: ArrayLike) -> MarginalMoments:
    """
    Means and widths of (sin theta, cos theta) / 2 over a uniform random phase.

    <X> = 0, <Y> = J0(a) / 2, sigma_x = sqrt((1 - J0(2a)) / 2) / 2 and
    sigma_y = sqrt((1 + J0(2a)) / 2 - J0(a)^2) / 2.
    """
    a = np.asarray(alpha_prime, dtype=float)
    j_single, j_double = j0(a), j0(2.0 * a)
    sigma_x = 0.5 * np.sqrt(np.clip((1.0 - j_double) / 2.0, 0.0, None))
    sigma_y = 0.5 * np.sqrt(np.clip((1.0 + j_double) / 2.0 - j_single**2, 0.0, None))
    return MarginalMoments(_out(np.zeros_like(a)), _out(0.5 * j_single), _out(sigma_x), _out(sigma_y))


def ensemble_moments(alpha_prime: ArrayLike, n_spins: int) -> EnsembleMoments:
    """
    Moments of the pseudo-spin K / N - 1/2 read out along X, Y and Z by N spins.

    The common phase adds the marginal spread; each spin's projection adds the binomial
    term E[P (1 - P)] / N with P = (1 + n.a) / 2.
    """
    if n_spins < 1:
        raise ValueError(f"n_spins must be >= 1, got {n_spins}")
    a = np.asarray(alpha_prime, dtype=float)
    moments = marginal_moments(a)
    j_double = j0(2.0 * a)
    var_x = np.square(moments.sigma_x) + (1.0 + j_double) / (8.0 * n_spins)
    var_y = np.square(moments.sigma_y) + (1.0 - j_double) / (8.0 * n_spins)
    sigma_z = np.full_like(a, 0.5 / math.sqrt(n_spins))
    return EnsembleMoments(
        moments.mean_x,
        moments.mean_y,
        _out(np.zeros_like(a)),
        _out(np.sqrt(var_x)),
        _out(np.sqrt(var_y)),
        _out(sigma_z),
    )
