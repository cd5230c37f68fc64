"""
Tomography
Monte Carlo readout of a spin ensemble after XY8 sensing of a random-phase AC field, and the
correlated versus independent relaxation comparison.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Literal, Sequence, Union

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike
from scipy.optimize import brentq
from scipy.special import j0
from tqdm import tqdm

from Ensemble import EnsembleConfig, shot_noise_prime
from Readout import photon_counts, shot_rng

from .dd_signal import interaction_strength
from .models import AcSignal, DdSequence, ReadoutAxis, SincConvention

logger = logging.getLogger(__name__)

AxisSpec = Union[str, ReadoutAxis]
NoiseModel = Literal["common_drive", "independent"]


@dataclass(frozen=True)
class AxisReadout:
    """Per-shot values and summary statistics of one readout axis."""

    axis: ReadoutAxis
    values: np.ndarray
    spin_counts: np.ndarray
    mean: float
    sigma_prime: float
    err: float
    latent_sigma: float
    counts: np.ndarray
    edges: np.ndarray


@dataclass(frozen=True)
class TomographyResult:
    """Readouts of every axis plus what deconvolution needs to invert the photon chain."""

    axes: Dict[str, AxisReadout]
    n: float
    contrast: float
    k1: float
    n_spins: int
    tau: float
    alpha_prime: float

    @property
    def signal_scale(self) -> float:
        return math.sqrt(self.k1)

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "axis": name,
                "theta": readout.axis.theta,
                "phi": readout.axis.phi,
                "tau": self.tau,
                "mean": readout.mean,
                "sigma_prime": readout.sigma_prime,
                "err": readout.err,
            }
            for name, readout in self.axes.items()
        ]
        return pd.DataFrame(rows)

    def histograms_frame(self) -> pd.DataFrame:
        rows = []
        for name, readout in self.axes.items():
            for count, left, right in zip(readout.counts, readout.edges[:-1], readout.edges[1:]):
                rows.append({"axis": name, "bin_left": left, "bin_right": right, "count": int(count)})
        return pd.DataFrame(rows)

    def metadata(self) -> Dict:
        return {
            "n": self.n,
            "contrast": self.contrast,
            "k": self.signal_scale,
            "n_spins": self.n_spins,
            "alpha_prime": self.alpha_prime,
            "axes": {name: {"theta": r.axis.theta, "phi": r.axis.phi} for name, r in self.axes.items()},
        }


def _resolve_axis(axis: AxisSpec) -> ReadoutAxis:
    return axis if isinstance(axis, ReadoutAxis) else ReadoutAxis.named(axis)


def simulate_tomography(
    seq: DdSequence,
    signal: AcSignal,
    axes: Sequence[AxisSpec],
    cfg: EnsembleConfig,
    shots: int,
    seed: int,
    k1: float = 1.0,
    m: int = 1,
    convention: SincConvention = SincConvention.LITERAL,
    bins: int = 41,
    progress: bool = False,
) -> TomographyResult:
    """
    Sense the AC field with all spins sharing one random phase per shot, then read out.

    The spins start along +Y and rotate in the equatorial plane by theta = alpha' sin(lambda).
    Each spin reads + along axis a with probability (1 + n.a) / 2; the binned pseudo-spin
    K / N - 1/2 is scaled by sqrt(k1) and passed through the photon chain of ``cfg`` with
    n = photons_per_unit * m.

    Args:
        seq: Pulse train.
        signal: AC field.
        axes: Readout axes, by name (X, Y, Z) or as ReadoutAxis.
        cfg: Ensemble; n_nv spins take part, contrast sets the photon chain.
        shots: Experiments per axis.
        seed: Root seed; each axis owns the stream (seed, axis index).
        k1: Readout-infidelity variance scale.
        m: Readout repetitions per shot.
        convention: Detuning sinc convention.
        bins: Histogram bins of the normalized signal.

    Returns:
        TomographyResult keyed by axis name.
    """
    if shots < 2:
        raise ValueError("tomography needs at least two shots per axis")
    if not 0.0 < k1 <= 1.0:
        raise ValueError(f"k1 must be in (0, 1], got {k1}")
    resolved = [_resolve_axis(axis) for axis in axes]
    names = [axis.name for axis in resolved]
    if len(set(names)) != len(names):
        raise ValueError("readout axis names must be unique")

    alpha_prime = interaction_strength(seq, signal, convention).alpha_prime
    n = cfg.photons_per_unit * m
    contrast = cfg.contrast
    scale = math.sqrt(k1)
    shot_width = float(shot_noise_prime(n, contrast))

    readouts: Dict[str, AxisReadout] = {}
    for index, axis in enumerate(tqdm(resolved, desc="tomography", disable=not progress)):
        rng = shot_rng(seed, index)
        lam = rng.uniform(0.0, 2.0 * math.pi, shots)
        theta = alpha_prime * np.sin(lam)
        bloch = np.stack([np.sin(theta), np.cos(theta), np.zeros_like(theta)], axis=1)
        probability = np.clip((1.0 + bloch @ axis.direction) / 2.0, 0.0, 1.0)
        spin_counts = rng.binomial(cfg.n_nv, probability)
        latent = scale * (spin_counts / cfg.n_nv - 0.5)
        a, b, _, _ = photon_counts(rng, n, contrast, 0.5 + latent)
        values = (b - a) / (2.0 * n * contrast)
        sigma_prime = float(values.std(ddof=1))
        counts, edges = np.histogram(values, bins=bins)
        readouts[axis.name] = AxisReadout(
            axis=axis,
            values=values,
            spin_counts=spin_counts,
            mean=float(values.mean()),
            sigma_prime=sigma_prime,
            err=sigma_prime / math.sqrt(2.0 * (shots - 1)),
            latent_sigma=float(latent.std(ddof=1)),
            counts=counts,
            edges=edges,
        )
        logger.debug("axis %s: mean=%.4f sigma'=%.4f shot'=%.4f", axis.name, readouts[axis.name].mean,
                     sigma_prime, shot_width)

    return TomographyResult(
        axes=readouts, n=n, contrast=contrast, k1=k1, n_spins=cfg.n_nv, tau=seq.tau, alpha_prime=alpha_prime
    )


def common_drive_mean(t: ArrayLike, n_sources: int = 10) -> np.ndarray:
    """
    Mean polarization cos(Omega0 t sum_k g_k) of a spin rotated by a shared random drive.

    Each source contributes g_k = sqrt(2 / n_sources) cos(psi_k) with psi_k uniform, so the
    average is J0(sqrt(2 / n_sources) Omega0 t)^n_sources. Time is in units of 1 / Omega0.
    """
    t = np.asarray(t, dtype=float)
    return np.power(j0(math.sqrt(2.0 / n_sources) * t), n_sources)


def common_drive_decay_time(n_sources: int = 10) -> float:
    """Time (in 1 / Omega0) at which the common-drive mean falls to 1/e."""
    first_zero = 2.404825557695773 / math.sqrt(2.0 / n_sources)
    return brentq(lambda t: float(common_drive_mean(t, n_sources)) - math.exp(-1.0), 0.0, first_zero)


def correlated_vs_uncorrelated_t1(
    cfg: EnsembleConfig,
    noise: NoiseModel,
    times: Sequence[float],
    shots: int = 2000,
    seed: int = 0,
    n_sources: int = 10,
) -> pd.DataFrame:
    """
    Decay of a polarized ensemble driven by spatially correlated or independent noise.

    Times are in units of the 1/e decay time of the mean, so both models decay alike on
    average. Under ``common_drive`` every spin of a shot turns by the same random angle;
    under ``independent`` each spin relaxes on its own.

    Args:
        cfg: Ensemble; only n_nv is used.
        noise: ``common_drive`` or ``independent``.
        times: Non-negative times in decay-time units.
        shots: Experiments per time point.
        seed: Root seed; time point i of each model owns its own stream.
        n_sources: Randomized drive sources summed into the common drive.

    Returns:
        DataFrame with columns time, mean, mean_err, sigma, sigma_err, thermal.
    """
    grid = np.asarray(times, dtype=float)
    if grid.size == 0 or np.any(grid < 0):
        raise ValueError("times must be a non-empty grid of non-negative values")
    if noise not in ("common_drive", "independent"):
        raise ValueError(f"unknown noise model: {noise}")
    n_spins = cfg.n_nv
    to_drive_units = common_drive_decay_time(n_sources)

    rows: List[Dict[str, float]] = []
    for index, t in enumerate(grid):
        rng = shot_rng(seed, index, 0 if noise == "common_drive" else 1)
        if noise == "common_drive":
            psi = rng.uniform(0.0, 2.0 * math.pi, (shots, n_sources))
            drive = math.sqrt(2.0 / n_sources) * np.cos(psi).sum(axis=1)
            probability = np.cos(drive * t * to_drive_units / 2.0) ** 2
        else:
            probability = np.full(shots, (1.0 + math.exp(-t)) / 2.0)
        values = rng.binomial(n_spins, probability) / n_spins - 0.5
        sigma = float(values.std(ddof=1))
        rows.append(
            {
                "time": float(t),
                "mean": float(values.mean()),
                "mean_err": sigma / math.sqrt(shots),
                "sigma": sigma,
                "sigma_err": sigma / math.sqrt(2.0 * (shots - 1)),
                "thermal": 0.5 / math.sqrt(n_spins),
            }
        )
    return pd.DataFrame(rows)


def relaxation_comparison(
    cfg: EnsembleConfig, times: Sequence[float], shots: int = 2000, seed: int = 0, n_sources: int = 10
) -> pd.DataFrame:
    """Both noise models on one grid, columns suffixed ``_common`` and ``_independent``."""
    common = correlated_vs_uncorrelated_t1(cfg, "common_drive", times, shots, seed, n_sources)
    independent = correlated_vs_uncorrelated_t1(cfg, "independent", times, shots, seed, n_sources)
    return common.merge(independent, on=["time", "thermal"], suffixes=("_common", "_independent"))
