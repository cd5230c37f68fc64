"""
Noise Analysis Types
Decomposition of observed signal widths and the shot-to-projection crossover curve.
"""

from __future__ import annotations

import math
from typing import List, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator


class NoiseDecomposition(BaseModel):
    """
    Observed normalized width split into photon shot noise and spin projection noise.

    sigma_prime = k * sqrt(sigma_shot_prime^2 + sigma_proj^2) holds exactly unless the
    excess was clipped.
    """

    model_config = ConfigDict(frozen=True)

    n: float = Field(..., gt=0.0, description="Mean baseline photons")
    c: float = Field(..., description="Contrast used for normalization")
    records: int = Field(..., ge=2)
    sigma_total: float = Field(..., ge=0.0, description="Standard deviation of b - a")
    sigma_prime: float = Field(..., ge=0.0, description="sigma_total / (2 n c)")
    sigma_prime_err: float = Field(..., description="Chi-distribution standard error of sigma_prime")
    sigma_shot_prime: float = Field(..., ge=0.0)
    sigma_proj: float = Field(..., ge=0.0)
    sigma_proj_err: float = Field(...)
    k: float = Field(1.0, gt=0.0)
    clipped: bool = Field(False, description="Variance excess was negative and set to zero")
    degenerate: bool = Field(False, description="All records equal; errors undefined")

    @property
    def db_gap(self) -> float:
        """Projection noise above shot noise in dB, 20 log10(sigma_proj / sigma_shot_prime)."""
        if self.sigma_proj <= 0:
            return -math.inf
        return 20.0 * math.log10(self.sigma_proj / self.sigma_shot_prime)


class KCalibration(BaseModel):
    """Result of fitting sigma / n = k sqrt(2 / n) to reference-channel widths."""

    model_config = ConfigDict(frozen=True)

    k: float
    err: float
    points: int
    single_n: bool = Field(False, description="Only one distinct n; ratio with inflated error")
    at_bound: bool = Field(False, description="Estimate clipped to the upper bound 1.1")


class CrossoverPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int
    n: float
    sigma_prime: float
    err: float
    decomposition: Optional[NoiseDecomposition] = None


class CrossoverCurve(BaseModel):
    """Normalized width against photon number; n strictly increasing."""

    model_config = ConfigDict(frozen=True)

    points: List[CrossoverPoint]

    @model_validator(mode="after")
    def _increasing(self) -> "CrossoverCurve":
        values = [point.n for point in self.points]
        if any(later <= earlier for earlier, later in zip(values, values[1:])):
            raise ValueError("crossover points must have strictly increasing n")
        return self

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for point in self.points:
            row = {"m": point.m, "n": point.n, "sigma_prime": point.sigma_prime, "err": point.err}
            if point.decomposition is not None:
                row.update(
                    sigma_shot_prime=point.decomposition.sigma_shot_prime,
                    sigma_proj=point.decomposition.sigma_proj,
                    sigma_proj_err=point.decomposition.sigma_proj_err,
                    db_gap=point.decomposition.db_gap,
                )
            rows.append(row)
        return pd.DataFrame(rows)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "CrossoverCurve":
        return cls(
            points=[
                CrossoverPoint(m=int(row.m), n=float(row.n), sigma_prime=float(row.sigma_prime), err=float(row.err))
                for row in frame.itertuples(index=False)
            ]
        )
