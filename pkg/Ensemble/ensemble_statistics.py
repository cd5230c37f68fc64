"""
Ensemble Statistics
Closed-form projection-noise statistics of a relaxing spin ensemble under repetitive readout.

All quantities are normalized per spin. Durations share whatever unit the caller uses for
the relaxation constant (readout repetitions or accumulated photons).
"""

from __future__ import annotations

from typing import Literal, NamedTuple, Union

import numpy as np
from numpy.typing import ArrayLike

from .models import BINNED_STEADY_STATE, EnsembleConfig, SpinSpecies

FloatOrArray = Union[float, np.ndarray]
Averaging = Literal["instantaneous", "time_averaged"]
DecayForm = Literal["derived", "doubled"]

# Below this x = T / t1 the closed forms lose digits to cancellation; use the Taylor series.
_SERIES_CUTOFF = 1e-2


class RelaxationStatistics(NamedTuple):
    expectation: FloatOrArray
    sigma: FloatOrArray


def _out(values: np.ndarray) -> FloatOrArray:
    return float(values) if np.ndim(values) == 0 else values


def _check_duration(T: ArrayLike, t1: float) -> np.ndarray:
    T = np.asarray(T, dtype=float)
    if np.any(T < 0):
        raise ValueError("readout duration T must be non-negative")
    if not t1 > 0:
        raise ValueError(f"relaxation time must be positive, got {t1}")
    return T


def mean_decay(x: ArrayLike) -> FloatOrArray:
    """
    Time average of exp(-t) over [0, x], i.e. (1 - e^-x) / x, with value 1 at x = 0.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < _SERIES_CUTOFF
    xs = x[small]
    out[small] = 1.0 - xs / 2.0 + xs**2 / 6.0 - xs**3 / 24.0 + xs**4 / 120.0
    xl = x[~small]
    out[~small] = -np.expm1(-xl) / xl
    return _out(out)


def thermal_sigma0(species: SpinSpecies, n_nv: float) -> float:
    """
    Thermal projection noise of the per-spin normalized collective spin.

    Args:
        species: Spin species of the ensemble.
        n_nv: Number of spins (may be fractional inside fits).

    Returns:
        sqrt(I(I+1) / (3 N)).
    """
    if n_nv < 1:
        raise ValueError(f"n_nv must be >= 1, got {n_nv}")
    spin = species.spin
    return float(np.sqrt(spin * (spin + 1.0) / (3.0 * n_nv)))


def binning_factor(species: SpinSpecies) -> float:
    """Width reduction from reading three levels through a two-outcome channel."""
    return float(np.sqrt(1.0 / 3.0)) if species.is_binned else 1.0


def decay_factor(T: ArrayLike, t1: float, form: DecayForm = "derived") -> FloatOrArray:
    """
    Sigma multiplier from time-averaging an exponentially relaxing measurement.

    The ``derived`` form is sqrt((2/x^2)(x + e^-x - 1)) with x = T / t1, the exact
    value of (2/T^2) * integral_0^T (T - tau) e^(-tau/t1) dtau. The ``doubled`` form
    uses 2x inside the bracket and is kept only for comparison runs; it diverges at T = 0.

    Args:
        T: Readout duration(s), same unit as t1.
        t1: Relaxation time.
        form: ``derived`` (default) or ``doubled``.

    Returns:
        Factor in (0, 1] for the derived form.

    Raises:
        ValueError: If T < 0 or t1 <= 0.
    """
    T = _check_duration(T, t1)
    x = T / t1
    if form == "derived":
        f_sq = np.empty_like(x)
        small = x < _SERIES_CUTOFF
        xs = x[small]
        f_sq[small] = (
            1.0 - xs / 3.0 + xs**2 / 12.0 - xs**3 / 60.0 + xs**4 / 360.0 - xs**5 / 2520.0
        )
        xl = x[~small]
        f_sq[~small] = 2.0 * (xl + np.expm1(-xl)) / xl**2
    elif form == "doubled":
        with np.errstate(divide="ignore", invalid="ignore"):
            f_sq = np.where(x > 0, 2.0 * (2.0 * x + np.expm1(-x)) / np.square(x), np.inf)
    else:
        raise ValueError(f"unknown decay form: {form}")
    return _out(np.sqrt(f_sq))


def projection_noise(cfg: EnsembleConfig, T: ArrayLike) -> FloatOrArray:
    """
    Per-spin projection noise of the binned signal accumulated over duration T.

    T is expressed in accumulated baseline photons, the unit of ``cfg.decay_counts``.
    """
    return projection_noise_model(cfg.n_nv, T, cfg.decay_counts, cfg.species)


def projection_noise_model(
    n_nv: float, T: ArrayLike, t1: float, species: SpinSpecies | None = None
) -> FloatOrArray:
    """Functional form of :func:`projection_noise` for a continuous emitter count."""
    species = species or SpinSpecies.nitrogen14()
    return binning_factor(species) * thermal_sigma0(species, n_nv) * decay_factor(T, t1)


def projection_noise_unnormalized(cfg: EnsembleConfig, T: ArrayLike) -> FloatOrArray:
    """Projection noise of the summed (not per-spin) collective spin."""
    return cfg.n_nv * projection_noise(cfg, T)


def shot_noise_prime(n: ArrayLike, contrast: float) -> FloatOrArray:
    """
    Photon shot noise of the normalized signal (b - a) / (2 n c).

    The difference of the two readout windows has variance (2 - c) n, so the normalized
    width is sqrt(1 - c/2) sqrt(2n) / (2 n c).
    """
    n = np.asarray(n, dtype=float)
    if np.any(n <= 0):
        raise ValueError("photon count n must be positive")
    return _out(np.sqrt(1.0 - contrast / 2.0) * np.sqrt(2.0 * n) / (2.0 * n * contrast))


def relaxation_statistics(
    p: float,
    T: ArrayLike,
    t1: float,
    averaging: Averaging,
    *,
    sigma0: float = 1.0,
    species: SpinSpecies | None = None,
) -> RelaxationStatistics:
    """
    Expectation and projection noise of a relaxing polarized ensemble.

    Args:
        p: Initial polarization in [-1, 1].
        T: Elapsed (instantaneous) or integration (time-averaged) duration.
        t1: Relaxation time.
        averaging: ``instantaneous`` for the value at time T, ``time_averaged`` for the
            mean over [0, T].
        sigma0: Thermal projection noise of the ensemble.
        species: Spin species; defaults to spin 1/2.

    Returns:
        RelaxationStatistics(expectation, sigma).
    """
    if not -1.0 <= p <= 1.0:
        raise ValueError(f"polarization must be in [-1, 1], got {p}")
    species = species or SpinSpecies.spin_half()
    T = _check_duration(T, t1)
    x = T / t1

    if averaging == "instantaneous":
        retained = np.exp(-x)
        sigma = sigma0 * np.sqrt(np.clip(1.0 - (p * retained) ** 2, 0.0, None))
    elif averaging == "time_averaged":
        retained = np.asarray(mean_decay(x))
        f_sq = np.square(decay_factor(T, t1))
        sigma = sigma0 * np.sqrt(np.clip(f_sq - (p * retained) ** 2, 0.0, None))
    else:
        raise ValueError(f"unknown averaging mode: {averaging}")

    expectation = p * species.spin * retained
    return RelaxationStatistics(_out(expectation), _out(sigma))


def polarization_under_readout(
    p0: float, m: ArrayLike, m_t1: float, p_ss: float = BINNED_STEADY_STATE
) -> FloatOrArray:
    """
    Observed polarization averaged over m readout repetitions while it relaxes.

    p_obs = p0 (1 - p_ss) (m_t1 / m)(1 - e^(-m / m_t1)) + p_ss
    """
    m = np.asarray(m, dtype=float)
    if np.any(m < 0):
        raise ValueError("repetition count must be non-negative")
    if not m_t1 > 0:
        raise ValueError(f"m_t1 must be positive, got {m_t1}")
    return _out(p0 * (1.0 - p_ss) * np.asarray(mean_decay(m / m_t1)) + p_ss)


def steady_state_polarization(species: SpinSpecies) -> float:
    return BINNED_STEADY_STATE if species.is_binned else 0.0


def initial_amplitude(p_init: float, p_ss: float = BINNED_STEADY_STATE) -> float:
    """Coefficient p0 of the decay law for a prepared polarization p_init."""
    return (p_init - p_ss) / (1.0 - p_ss)
