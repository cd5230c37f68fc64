"""
Readout Simulator
Monte Carlo generator of repetitive-readout experiments.

Every shot owns a generator derived from (seed, point, shot), so results do not depend on
how many worker threads run the shots.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Literal, NamedTuple, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from Ensemble import shot_noise_prime

from .apd import ApdModel
from .models import ApdSettings, ReadoutBatch, SimulationPlan
from .sequences import build_sequence
from .telegraph import TelegraphModel

logger = logging.getLogger(__name__)


def shot_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent counter-addressed generator for one unit of simulated work."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def photon_counts(
    rng: np.random.Generator, n: float, contrast: float, up_fraction: float
) -> Tuple[int, int, int, int]:
    """
    Draw the four window counts of one experiment.

    The bright level darkens window a by the contrast and every other level darkens window
    b, so a fully bright ensemble and a fully dark one differ by 2 n c in b - a.
    """
    mean_a = n * (1.0 - contrast * up_fraction)
    mean_b = n * (1.0 - contrast * (1.0 - up_fraction))
    a = rng.poisson(mean_a)
    b = rng.poisson(mean_b)
    r1 = rng.poisson(n)
    r2 = rng.poisson(n)
    return a, b, r1, r2


@dataclass(frozen=True)
class RabiPoint:
    """Statistics of the normalized signal at one rotation angle."""

    angle: float
    mean: float
    sigma_prime: float
    sigma_err: float
    sigma_spin: float
    latent_sigma: float
    counts: np.ndarray
    edges: np.ndarray


class DecayPoint(NamedTuple):
    m: int
    p_obs: float
    err: float


class ReadoutSimulator:
    """
    Runs simulation plans and the Rabi and relaxation sequences built on them.
    """

    def __init__(self, threads: int = 1, progress: bool = False):
        """
        Initialize ReadoutSimulator.

        Args:
            threads: Worker threads used for the shots of one plan.
            progress: Show a tqdm progress bar per plan.
        """
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        self.threads = threads
        self.progress = progress

    def simulate_experiment(self, plan: SimulationPlan, point: int = 0) -> ReadoutBatch:
        """
        Simulate ``plan.shots`` independent experiments.

        Args:
            plan: Validated simulation plan.
            point: Index of this plan inside a sweep; part of every shot's random key.

        Returns:
            ReadoutBatch with detector response applied.

        Raises:
            ValueError: If a window's photon mean is not positive.
        """
        cfg = plan.cfg
        n = plan.photons
        if n * (1.0 - cfg.contrast) <= 0:
            raise ValueError(f"non-positive photon mean with n={n} and contrast={cfg.contrast}")

        telegraph = TelegraphModel.from_plan(plan)
        sequence = build_sequence(plan)
        levels = cfg.species.levels

        def run_shot(shot: int) -> Tuple[int, int, int, int, float]:
            rng = shot_rng(plan.seed, point, shot)
            start = sequence.initialize(rng, cfg.n_nv, levels)
            path = telegraph.evolve(rng, start, plan.m)
            up_fraction = float(path.up_fraction.mean())
            return (*photon_counts(rng, n, cfg.contrast, up_fraction), up_fraction)

        shots = range(plan.shots)
        label = f"{sequence.get_sequence_name()} m={plan.m}"
        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                rows = list(tqdm(pool.map(run_shot, shots), total=plan.shots, desc=label, disable=not self.progress))
        else:
            rows = [run_shot(shot) for shot in tqdm(shots, desc=label, disable=not self.progress)]

        table = np.asarray(rows, dtype=float)
        batch = ReadoutBatch(
            a=table[:, 0], b=table[:, 1], r1=table[:, 2], r2=table[:, 3], m=plan.m, up_fraction=table[:, 4]
        )
        logger.debug("simulated %d shots of %s (point %d)", plan.shots, label, point)
        return self.apply_apd(batch, plan.apd)

    @staticmethod
    def apply_apd(batch: ReadoutBatch, model: Union[ApdModel, ApdSettings]) -> ReadoutBatch:
        """Apply a detector model (or the settings describing one) to a batch."""
        if isinstance(model, ApdSettings):
            model = ApdModel.create(model)
        return model.apply(batch)

    def run_rabi_sequence(
        self, plan: SimulationPlan, angle_grid: Sequence[float], bins: int = 40
    ) -> List[RabiPoint]:
        """
        Sweep the nuclear Rabi angle and collect the signal distribution at each angle.

        Args:
            plan: Base plan; its sequence is replaced by the Rabi preparation.
            angle_grid: Rotation angles in radians.
            bins: Histogram bins of the normalized signal.

        Returns:
            One RabiPoint per angle.
        """
        angles = np.asarray(angle_grid, dtype=float)
        if angles.size == 0:
            raise ValueError("angle grid is empty")

        k = ApdModel.create(plan.apd).k
        contrast = plan.cfg.contrast
        points: List[RabiPoint] = []
        for index, angle in enumerate(angles):
            batch = self.simulate_experiment(
                plan.model_copy(update={"sequence": "rabi", "angle": float(angle)}), point=index
            )
            n = float(np.mean(batch.baseline))
            values = batch.normalized_signal(n, contrast)
            sigma_prime = float(values.std(ddof=1)) if len(values) > 1 else 0.0
            excess = (sigma_prime / k) ** 2 - shot_noise_prime(n, contrast) ** 2
            counts, edges = np.histogram(values, bins=bins)
            points.append(
                RabiPoint(
                    angle=float(angle),
                    mean=float(values.mean()),
                    sigma_prime=sigma_prime,
                    sigma_err=sigma_prime / np.sqrt(2.0 * max(len(values) - 1, 1)),
                    sigma_spin=float(np.sqrt(max(excess, 0.0))),
                    latent_sigma=float(np.std(batch.up_fraction, ddof=1)) if len(values) > 1 else 0.0,
                    counts=counts,
                    edges=edges,
                )
            )
        return points

    def run_t1_sequence(
        self,
        plan: SimulationPlan,
        level: Literal["up", "zero"],
        m_grid: Sequence[int],
        source: Literal["photons", "latent"] = "photons",
    ) -> List[DecayPoint]:
        """
        Observed polarization after preparing one level, for increasing readout lengths.

        Args:
            plan: Base plan; sequence, level and m are replaced per grid point.
            level: Prepared level.
            m_grid: Strictly ascending repetition counts.
            source: ``photons`` estimates p from (b - a) / (n c); ``latent`` uses the
                simulated spin occupancy directly.

        Returns:
            One DecayPoint (m, p_obs, err) per grid value.
        """
        grid = [int(m) for m in m_grid]
        if not grid or any(later <= earlier for earlier, later in zip(grid, grid[1:])):
            raise ValueError("m_grid must be non-empty and strictly ascending")

        points: List[DecayPoint] = []
        for index, m in enumerate(grid):
            batch = self.simulate_experiment(
                plan.model_copy(update={"sequence": "polarized", "level": level, "m": m}), point=index
            )
            if source == "photons":
                n = float(np.mean(batch.baseline))
                polarization = batch.signal / (n * plan.cfg.contrast)
            else:
                polarization = 2.0 * batch.up_fraction - 1.0
            err = float(polarization.std(ddof=1) / np.sqrt(len(polarization))) if len(polarization) > 1 else 0.0
            points.append(DecayPoint(m=m, p_obs=float(polarization.mean()), err=err))
        return points
