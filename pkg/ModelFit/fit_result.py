"""
Fit Result
Estimates, covariance and diagnostics returned by every fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np


def _json_number(value: float):
    return float(value) if math.isfinite(value) else None


@dataclass
class FitResult:
    """
    Outcome of one fit.

    ``covariance`` is ordered like ``names``; entries of parameters the data cannot
    constrain are infinite and those parameters are marked not identifiable.
    """

    names: Tuple[str, ...]
    params: Dict[str, float]
    errors: Dict[str, float]
    covariance: np.ndarray
    residual_norm: float
    converged: bool
    iterations: int
    identifiable: Dict[str, bool] = field(default_factory=dict)
    message: str = ""

    def __post_init__(self) -> None:
        cov = np.asarray(self.covariance, dtype=float)
        if cov.shape != (len(self.names), len(self.names)):
            raise ValueError("covariance shape does not match parameter names")
        finite = np.isfinite(cov)
        if not np.allclose(cov[finite], cov.T[finite]):
            raise ValueError("covariance must be symmetric")
        self.covariance = cov
        if self.residual_norm < 0:
            raise ValueError("residual norm must be non-negative")
        for name in self.names:
            self.identifiable.setdefault(name, True)

    @property
    def all_identifiable(self) -> bool:
        return all(self.identifiable.values())

    def to_dict(self) -> Dict:
        return {
            "params": {name: _json_number(self.params[name]) for name in self.names},
            "errors": {name: _json_number(self.errors[name]) for name in self.names},
            "identifiable": {name: bool(self.identifiable[name]) for name in self.names},
            "covariance": [[_json_number(v) for v in row] for row in self.covariance],
            "names": list(self.names),
            "residual_norm": _json_number(self.residual_norm),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "message": self.message,
        }
