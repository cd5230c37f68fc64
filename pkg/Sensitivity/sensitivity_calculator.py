"""
Sensitivity Calculator
Slope-detection sensitivity of a single conventional readout versus the nitrogen-assisted
repetitive readout, optimal repetition counts and the advantage map.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike
from scipy.optimize import brentq, minimize_scalar
from tqdm import tqdm

from .models import DecayConvention, SensitivityParams, SqueezingSpec

logger = logging.getLogger(__name__)

MICROSECOND = 1e-6


class OptimumPoint(NamedTuple):
    """Best repetition count and the sensitivity it reaches (T/sqrt(Hz))."""

    m: int
    eta: float


@dataclass(frozen=True)
class SensitivityMap:
    """eta_conv / eta_rep on a (tau_sens, m) grid; ratios above 1 favour repetitive readout."""

    tau_sens: np.ndarray
    m: np.ndarray
    eta_conv: np.ndarray
    eta_rep: np.ndarray

    @property
    def ratio(self) -> np.ndarray:
        return self.eta_conv[:, None] / self.eta_rep

    def to_frame(self) -> pd.DataFrame:
        tau, m = np.meshgrid(self.tau_sens, self.m, indexing="ij")
        return pd.DataFrame(
            {
                "tau_sens": tau.ravel(),
                "m": m.ravel(),
                "eta_conv": np.repeat(self.eta_conv, self.m.size),
                "eta_rep": self.eta_rep.ravel(),
                "ratio": self.ratio.ravel(),
            }
        )


class SensitivityCalculator:
    """
    Sensitivities eta = sigma / (2 pi gamma_e c_eff n sqrt(tau_sens)) * sqrt(T_meas / tau_sens).

    Durations are taken in microseconds and converted to seconds, so every eta is in T/sqrt(Hz).
    """

    def __init__(
        self,
        params: Optional[SensitivityParams] = None,
        convention: DecayConvention = DecayConvention.CORRECTED,
    ):
        """
        Args:
            params: Timing and photon budget. Defaults to the reference parameter set.
            convention: Effective-contrast decay convention of the repetitive readout.
        """
        self.params = params or SensitivityParams()
        self.convention = DecayConvention(convention)

    def _prefactor(self) -> float:
        return 1.0 / (2.0 * math.pi * self.params.gamma_e)

    def eta_conventional(self, tau_sens: ArrayLike) -> np.ndarray:
        """Single readout: sigma = sqrt(n_1), c_eff = c, overhead tau_r."""
        tau = np.asarray(tau_sens, dtype=float)
        if np.any(tau <= 0):
            raise ValueError("tau_sens must be positive")
        p = self.params
        duty = np.sqrt((tau + p.tau_r) / tau)
        eta = self._prefactor() / (p.c * p.n1 * np.sqrt(tau * MICROSECOND)) * duty * math.sqrt(p.n1)
        return eta if eta.ndim else float(eta)

    def decay_factor(self, m: ArrayLike) -> np.ndarray:
        """Reduction of the doubled contrast after m repetitions under the active convention."""
        x = np.asarray(m, dtype=float) / self.params.m_t1
        # -expm1(-x) / x keeps precision for m << m_T1
        averaged = np.where(x > 0, -np.expm1(-x) / np.where(x > 0, x, 1.0), 1.0)
        if self.convention is DecayConvention.LITERAL:
            return x * x * averaged
        return averaged

    def effective_contrast(self, m: ArrayLike) -> np.ndarray:
        """c_eff = 2 c D(m) of the double-sided repetitive readout."""
        return 2.0 * self.params.c * self.decay_factor(m)

    def eta_repetitive(
        self, tau_sens: ArrayLike, m: ArrayLike, squeezing: Optional[SqueezingSpec] = None
    ) -> np.ndarray:
        """
        Repetitive readout of a superposition state after m repetitions.

        sigma = sqrt(2 n_1 m + (c_eff n_1 m sigma_proj)^2) with sigma_proj = sqrt(1 / (2 N_NV)),
        scaled by the squeezing factor. The accumulated signal is c_eff n_1 m under the corrected
        convention and c_eff n_1 under the literal one. The overhead is
        tau_init + tau_rf + m tau_r_rep, plus tau_sq when squeezing is applied.

        Args:
            tau_sens: Sensing time(s) in microseconds.
            m: Repetition count(s) >= 1, broadcast against tau_sens.
            squeezing: Optional squeezing of the projection noise.

        Returns:
            Sensitivity in T/sqrt(Hz), broadcast over the inputs.
        """
        tau = np.asarray(tau_sens, dtype=float)
        m = np.asarray(m, dtype=float)
        if np.any(tau <= 0):
            raise ValueError("tau_sens must be positive")
        if np.any(m < 1):
            raise ValueError("m must be at least 1")
        p = self.params
        c_eff = self.effective_contrast(m)
        amplitude = squeezing.amplitude_factor if squeezing is not None else 1.0
        sigma_proj = math.sqrt(1.0 / (2.0 * p.n_nv)) * amplitude
        photons = p.n1 * m
        sigma = np.sqrt(2.0 * photons + (c_eff * photons * sigma_proj) ** 2)
        overhead = p.repetitive_overhead + m * p.tau_r_rep + (p.tau_sq if squeezing is not None else 0.0)
        duty = np.sqrt((tau + overhead) / tau)
        signal = c_eff * (photons if self.convention is DecayConvention.CORRECTED else p.n1)
        eta = self._prefactor() / (signal * np.sqrt(tau * MICROSECOND)) * duty * sigma
        return eta if eta.ndim else float(eta)

    def optimize_repetitions(
        self, tau_sens: float, squeezing: Optional[SqueezingSpec] = None, scan: int = 3
    ) -> OptimumPoint:
        """
        Integer m in [1, 10 m_T1] minimizing eta_rep.

        Bounded minimization over log m on the continuous relaxation, then a scan of the
        integers within ``scan`` of the continuous optimum.
        """
        if tau_sens <= 0:
            raise ValueError("tau_sens must be positive")
        upper = 10.0 * self.params.m_t1
        result = minimize_scalar(
            lambda u: float(self.eta_repetitive(tau_sens, math.exp(u), squeezing)),
            bounds=(0.0, math.log(upper)),
            method="bounded",
            options={"xatol": 1e-6},
        )
        center = int(round(math.exp(result.x)))
        candidates = np.arange(max(1, center - scan), min(int(upper), center + scan) + 1)
        etas = self.eta_repetitive(tau_sens, candidates, squeezing)
        best = int(np.argmin(etas))
        logger.debug("tau_sens=%.4g us: m*=%d eta=%.4g", tau_sens, candidates[best], etas[best])
        return OptimumPoint(m=int(candidates[best]), eta=float(etas[best]))

    def sensitivity_map(
        self,
        tau_sens: Sequence[float],
        m_values: Sequence[float],
        squeezing: Optional[SqueezingSpec] = None,
        progress: bool = False,
    ) -> SensitivityMap:
        """Ratio field eta_conv / eta_rep with tau_sens along rows and m along columns."""
        taus = np.asarray(tau_sens, dtype=float)
        ms = np.asarray(m_values, dtype=float)
        if taus.size == 0 or ms.size == 0:
            raise ValueError("sensitivity map needs non-empty tau_sens and m grids")
        eta_conv = np.atleast_1d(self.eta_conventional(taus))
        rows = [
            np.atleast_1d(self.eta_repetitive(tau, ms, squeezing))
            for tau in tqdm(taus, desc="sensitivity map", disable=not progress)
        ]
        return SensitivityMap(tau_sens=taus, m=ms, eta_conv=eta_conv, eta_rep=np.vstack(rows))

    def breakeven_tau_sens(
        self,
        m: Optional[int] = None,
        squeezing: Optional[SqueezingSpec] = None,
        bracket: Tuple[float, float] = (1e-2, 1e7),
    ) -> float:
        """
        Smallest sensing time (us) at which repetitive readout beats conventional readout.

        With ``m`` omitted the repetitive readout runs at its optimal m for every tau_sens.
        """

        def advantage(log_tau: float) -> float:
            tau = math.exp(log_tau)
            rep = self.optimize_repetitions(tau, squeezing).eta if m is None else self.eta_repetitive(tau, m, squeezing)
            return math.log(self.eta_conventional(tau)) - math.log(rep)

        low, high = (math.log(value) for value in bracket)
        if advantage(low) >= 0:
            return bracket[0]
        if advantage(high) <= 0:
            raise ValueError(f"repetitive readout never wins below tau_sens = {bracket[1]:g} us")
        return math.exp(brentq(advantage, low, high, xtol=1e-10))

    def report(self, tau_sens: Sequence[float], squeezing: Optional[SqueezingSpec] = None) -> Dict:
        """Optimal m and the corresponding gain for every sensing time, as plain data."""
        rows = []
        for tau in tau_sens:
            best = self.optimize_repetitions(float(tau), squeezing)
            rows.append(
                {
                    "tau_sens": float(tau),
                    "m_opt": best.m,
                    "eta_rep": best.eta,
                    "eta_conv": self.eta_conventional(float(tau)),
                    "ratio": self.eta_conventional(float(tau)) / best.eta,
                }
            )
        return {
            "convention": self.convention.value,
            "squeezing_db": squeezing.xi_sq_db if squeezing is not None else 0.0,
            "params": self.params.model_dump(),
            "optimum": rows,
        }
