"""
Coherent State Mixture
Equal-weight fans of spin coherent states plus a thermal part, their marginal distributions
along arbitrary axes, and the Husimi Q function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Literal, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import gammaln, xlog1py, xlogy

from Spectroscopy import ReadoutAxis

from .dicke import DickeBasis, SpinCoherentState, twice_j, wigner_small_d

MarginalMethod = Literal["binomial", "wigner"]


@dataclass(frozen=True)
class MarginalDistribution:
    """Distribution of m = -J .. J measured along one axis."""

    axis: ReadoutAxis
    probabilities: np.ndarray
    counts: float = 1.0
    low_confidence: bool = False
    iterations: int = 0

    def __post_init__(self) -> None:
        probabilities = np.asarray(self.probabilities, dtype=float)
        if probabilities.ndim != 1 or probabilities.size < 2:
            raise ValueError("marginal needs at least two m values")
        if np.any(probabilities < 0):
            raise ValueError("probabilities must be non-negative")
        if abs(probabilities.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities must sum to 1, got {probabilities.sum():.12f}")
        object.__setattr__(self, "probabilities", probabilities)

    @property
    def j(self) -> float:
        return (self.probabilities.size - 1) / 2.0

    @property
    def m_values(self) -> np.ndarray:
        return DickeBasis(self.j).m_values

    def mean(self) -> float:
        return float(self.probabilities @ self.m_values)

    def total_variation(self, other: "MarginalDistribution") -> float:
        if other.probabilities.shape != self.probabilities.shape:
            raise ValueError("marginals belong to different J blocks")
        return 0.5 * float(np.abs(self.probabilities - other.probabilities).sum())

    def to_dict(self) -> Dict:
        return {
            "axis": self.axis.model_dump(),
            "probabilities": self.probabilities.tolist(),
            "counts": self.counts,
            "low_confidence": self.low_confidence,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class CoherentStateMixture:
    """
    rho = sum_k a_k |theta, phi_k><theta, phi_k| + a_therm 1 / (2J + 1).

    The n_components states share theta and sit equally spaced in phi over
    [center_phi - delta_phi, center_phi + delta_phi] with equal weights.
    """

    j: float
    delta_phi: float
    theta: float = math.pi / 2.0
    a_therm: float = 0.0
    n_components: int = 51
    center_phi: float = math.pi / 2.0
    extra: Dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        twice_j(self.j)
        if not 0.0 <= self.a_therm <= 1.0:
            raise ValueError(f"a_therm must be in [0, 1], got {self.a_therm}")
        if self.delta_phi < 0:
            raise ValueError("delta_phi must be non-negative")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError("theta must be in [0, pi]")
        if self.n_components < 1:
            raise ValueError("need at least one component")

    @classmethod
    def equatorial_fan(
        cls, j: float, delta_phi: float, theta: float = math.pi / 2.0, a_therm: float = 0.0, n_components: int = 51
    ) -> "CoherentStateMixture":
        return cls(j=j, delta_phi=delta_phi, theta=theta, a_therm=a_therm, n_components=n_components)

    @property
    def component_phis(self) -> np.ndarray:
        return self.center_phi + self.delta_phi * np.linspace(-1.0, 1.0, self.n_components)

    @property
    def component_weight(self) -> float:
        return (1.0 - self.a_therm) / self.n_components

    @property
    def components(self) -> List[Tuple[float, SpinCoherentState]]:
        weight = self.component_weight
        return [(weight, SpinCoherentState(self.j, self.theta, float(phi))) for phi in self.component_phis]

    def component_directions(self) -> np.ndarray:
        phis = self.component_phis
        sin_theta = math.sin(self.theta)
        return np.stack(
            [sin_theta * np.cos(phis), sin_theta * np.sin(phis), np.full(phis.shape, math.cos(self.theta))], axis=1
        )

    def to_dict(self) -> Dict:
        return {
            "j": self.j,
            "delta_phi_deg": math.degrees(self.delta_phi),
            "theta_deg": math.degrees(self.theta),
            "a_therm": self.a_therm,
            "n_components": self.n_components,
            "center_phi_deg": math.degrees(self.center_phi),
            "component_weight": self.component_weight,
            **self.extra,
        }


def binomial_log_pmf(twice: int, p: ArrayLike) -> np.ndarray:
    """log P(J + m = k) of Binomial(2J, p) for every k, broadcast over p."""
    p = np.asarray(p, dtype=float)[..., None]
    k = np.arange(twice + 1)
    log_binomial = gammaln(twice + 1.0) - gammaln(k + 1.0) - gammaln(twice - k + 1.0)
    return log_binomial + xlogy(k, p) + xlog1py(twice - k, -p)


def _binomial_marginal(mixture: CoherentStateMixture, axis: ReadoutAxis) -> np.ndarray:
    twice = twice_j(mixture.j)
    cosines = mixture.component_directions() @ axis.direction
    p = np.clip((1.0 + cosines) / 2.0, 0.0, 1.0)
    return np.exp(binomial_log_pmf(twice, p)).mean(axis=0)


def _wigner_marginal(mixture: CoherentStateMixture, axis: ReadoutAxis) -> np.ndarray:
    d = wigner_small_d(mixture.j, axis.theta)
    m = DickeBasis(mixture.j).m_values
    phase = np.exp(1j * axis.phi * m)
    total = np.zeros(m.size)
    for _, state in mixture.components:
        rotated = d.T @ (phase * state.amplitudes)
        total += np.abs(rotated) ** 2
    return total / mixture.n_components


def marginal_of_mixture(
    mixture: CoherentStateMixture, axis: ReadoutAxis, method: MarginalMethod = "binomial"
) -> MarginalDistribution:
    """
    Distribution of m along ``axis``.

    ``binomial`` uses that a coherent state is a product state, so each spin reads + along
    the axis with probability cos^2 of half the angle between them. ``wigner`` rotates the
    Dicke amplitudes into the axis frame; both agree to rounding.
    """
    if method == "binomial":
        coherent = _binomial_marginal(mixture, axis)
    elif method == "wigner":
        coherent = _wigner_marginal(mixture, axis)
    else:
        raise ValueError(f"unknown marginal method: {method}")
    dimension = coherent.size
    probabilities = (1.0 - mixture.a_therm) * coherent + mixture.a_therm / dimension
    probabilities = np.clip(probabilities, 0.0, None)
    return MarginalDistribution(axis=axis, probabilities=probabilities / probabilities.sum())


def husimi_q(
    mixture: CoherentStateMixture, thetas: ArrayLike, phis: ArrayLike, include_thermal: bool = False
) -> np.ndarray:
    """
    Q(theta, phi) = <theta, phi| rho |theta, phi> / pi on a grid.

    |<n1|n2>|^2 = ((1 + n1.n2) / 2)^(2J) for coherent states. The thermal part adds the
    constant a_therm / (pi (2J + 1)) and is left out unless requested.
    """
    thetas, phis = np.broadcast_arrays(np.asarray(thetas, dtype=float), np.asarray(phis, dtype=float))
    points = np.stack(
        [np.sin(thetas) * np.cos(phis), np.sin(thetas) * np.sin(phis), np.cos(thetas)], axis=-1
    )
    twice = twice_j(mixture.j)
    cosines = points @ mixture.component_directions().T
    overlap_sq = np.power(np.clip((1.0 + cosines) / 2.0, 0.0, 1.0), twice)
    q = mixture.component_weight * overlap_sq.sum(axis=-1) / math.pi
    if include_thermal:
        q = q + mixture.a_therm / (math.pi * (twice + 1))
    return q


def sphere_integral(fn: Callable[[np.ndarray, np.ndarray], np.ndarray], n_theta: int = 64, n_phi: int = 128) -> float:
    """Integral of fn(theta, phi) over the unit sphere, Gauss-Legendre in cos(theta) by uniform phi."""
    nodes, weights = np.polynomial.legendre.leggauss(n_theta)
    thetas = np.arccos(nodes)
    phis = np.arange(n_phi) * (2.0 * math.pi / n_phi)
    grid_theta, grid_phi = np.meshgrid(thetas, phis, indexing="ij")
    values = np.asarray(fn(grid_theta, grid_phi), dtype=float)
    return float(weights @ values.sum(axis=1) * (2.0 * math.pi / n_phi))


def husimi_normalization(mixture: CoherentStateMixture, n_theta: Optional[int] = None) -> float:
    """(2J + 1) / 4 times the sphere integral of Q; equals the total coherent weight."""
    twice = twice_j(mixture.j)
    n_theta = n_theta or max(64, twice + 2)
    integral = sphere_integral(lambda t, p: husimi_q(mixture, t, p), n_theta=n_theta, n_phi=max(128, 2 * twice + 8))
    return (twice + 1) / 4.0 * integral
