"""
Readout Records
Photon counts of repetitive-readout experiments, one row per shot.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, List, Optional

import numpy as np
import pandas as pd

COUNT_COLUMNS = ("a", "b", "r1", "r2")


@dataclass(frozen=True)
class ReadoutRecord:
    """
    Counts of one experiment accumulated over m repetitions.

    ``a`` and ``b`` are the two spin-selective windows, ``r1`` and ``r2`` the reference
    windows that carry no spin signal.
    """

    a: float
    b: float
    r1: float
    r2: float
    m: int

    def __post_init__(self) -> None:
        if min(self.a, self.b, self.r1, self.r2) < 0:
            raise ValueError("photon counts must be non-negative")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")

    @property
    def signal(self) -> float:
        return self.b - self.a

    @property
    def baseline(self) -> float:
        return (self.r1 + self.r2) / 2.0

    @property
    def contrast(self) -> float:
        """Total readout contrast 2 - (a + b) / n of this record."""
        if self.baseline <= 0:
            raise ValueError("baseline must be positive to estimate contrast")
        return 2.0 - (self.a + self.b) / self.baseline


@dataclass(frozen=True)
class ReadoutBatch:
    """
    Column-oriented collection of records sharing one repetition count.

    ``up_fraction`` holds the latent fraction of spin-repetitions spent in the bright
    level for each shot, when the batch comes from the simulator.
    """

    a: np.ndarray
    b: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    m: int
    up_fraction: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        lengths = {len(np.atleast_1d(getattr(self, name))) for name in COUNT_COLUMNS}
        if len(lengths) != 1:
            raise ValueError("count columns must have equal length")
        for name in COUNT_COLUMNS:
            if np.any(np.asarray(getattr(self, name)) < 0):
                raise ValueError(f"column {name} has negative counts")

    def __len__(self) -> int:
        return len(self.a)

    @property
    def signal(self) -> np.ndarray:
        return self.b - self.a

    @property
    def baseline(self) -> np.ndarray:
        return (self.r1 + self.r2) / 2.0

    def normalized_signal(self, n: float, contrast: float) -> np.ndarray:
        """Signal in units of the per-spin collective spin, (b - a) / (2 n c)."""
        return self.signal / (2.0 * n * contrast)

    def with_counts(self, **columns: np.ndarray) -> "ReadoutBatch":
        return replace(self, **columns)

    def records(self) -> List[ReadoutRecord]:
        return [
            ReadoutRecord(float(a), float(b), float(r1), float(r2), self.m)
            for a, b, r1, r2 in zip(self.a, self.b, self.r1, self.r2)
        ]

    @classmethod
    def from_records(cls, records: Iterable[ReadoutRecord]) -> "ReadoutBatch":
        records = list(records)
        if not records:
            raise ValueError("no records given")
        repetitions = {record.m for record in records}
        if len(repetitions) != 1:
            raise ValueError("records must share one repetition count")
        columns = {
            name: np.array([getattr(record, name) for record in records], dtype=float)
            for name in COUNT_COLUMNS
        }
        return cls(m=repetitions.pop(), **columns)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({name: getattr(self, name) for name in COUNT_COLUMNS})
        frame.insert(0, "shot", np.arange(len(self)))
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, m: int) -> "ReadoutBatch":
        return cls(m=m, **{name: frame[name].to_numpy(dtype=float) for name in COUNT_COLUMNS})
