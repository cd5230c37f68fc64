"""
Dicke Basis
Collective spin states of N pseudo-spin-1/2 particles in the J = N/2 block, spin coherent
states and Wigner small-d rotations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, xlogy


def twice_j(j: float) -> int:
    """2J as an integer; rejects anything that is not a non-negative half-integer."""
    twice = 2.0 * j
    if twice < 0 or abs(twice - round(twice)) > 1e-12:
        raise ValueError(f"j must be a non-negative half-integer, got {j}")
    return int(round(twice))


@dataclass(frozen=True)
class DickeBasis:
    """States |J, m> ordered by ascending m = -J .. J."""

    j: float

    def __post_init__(self) -> None:
        twice_j(self.j)

    @classmethod
    def for_spins(cls, n_spins: int) -> "DickeBasis":
        return cls(j=n_spins / 2.0)

    @property
    def dimension(self) -> int:
        return twice_j(self.j) + 1

    @property
    def m_values(self) -> np.ndarray:
        return np.arange(self.dimension) - self.j

    def jz(self) -> np.ndarray:
        return np.diag(self.m_values)

    def j_plus(self) -> np.ndarray:
        m = self.m_values[:-1]
        return np.diag(np.sqrt(self.j * (self.j + 1.0) - m * (m + 1.0)), k=-1)

    def jy(self) -> np.ndarray:
        raising = self.j_plus()
        return (raising - raising.T) / 2j


@dataclass(frozen=True)
class SpinCoherentState:
    """All spins pointing along (theta, phi); theta from +Z, phi from +X."""

    j: float
    theta: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        twice_j(self.j)
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must be in [0, pi], got {self.theta}")

    @property
    def basis(self) -> DickeBasis:
        return DickeBasis(self.j)

    @property
    def direction(self) -> np.ndarray:
        return np.array(
            [
                math.sin(self.theta) * math.cos(self.phi),
                math.sin(self.theta) * math.sin(self.phi),
                math.cos(self.theta),
            ]
        )

    @property
    def amplitudes(self) -> np.ndarray:
        """<J, m | theta, phi> = sqrt(C(2J, J+m)) cos^(J+m)(theta/2) sin^(J-m)(theta/2) e^(i (J-m) phi)."""
        twice = twice_j(self.j)
        up = np.arange(twice + 1)  # J + m
        down = twice - up  # J - m
        log_binomial = gammaln(twice + 1.0) - gammaln(up + 1.0) - gammaln(down + 1.0)
        log_magnitude = 0.5 * log_binomial + xlogy(up, math.cos(self.theta / 2.0)) + xlogy(
            down, math.sin(self.theta / 2.0)
        )
        return np.exp(log_magnitude) * np.exp(1j * down * self.phi)


def coherent_overlap(first: SpinCoherentState, second: SpinCoherentState) -> complex:
    """<theta1, phi1 | theta2, phi2> = (c1 c2 + e^(i (phi2 - phi1)) s1 s2)^(2J)."""
    if abs(first.j - second.j) > 1e-12:
        raise ValueError("coherent states belong to different J blocks")
    c1, s1 = math.cos(first.theta / 2.0), math.sin(first.theta / 2.0)
    c2, s2 = math.cos(second.theta / 2.0), math.sin(second.theta / 2.0)
    base = c1 * c2 + complex(math.cos(second.phi - first.phi), math.sin(second.phi - first.phi)) * s1 * s2
    return base ** twice_j(first.j)


@lru_cache(maxsize=64)
def _jy_eigensystem(twice: int):
    basis = DickeBasis(twice / 2.0)
    return np.linalg.eigh(basis.jy())


def wigner_small_d(j: float, beta: float) -> np.ndarray:
    """
    Rotation matrix d^J(beta) = exp(-i beta J_y) in the ascending-m basis.

    Built from the cached eigen-decomposition of J_y, so a sweep over angles costs one
    diagonalization per J.
    """
    eigenvalues, vectors = _jy_eigensystem(twice_j(j))
    phases = np.exp(-1j * beta * eigenvalues)
    return ((vectors * phases) @ vectors.conj().T).real
