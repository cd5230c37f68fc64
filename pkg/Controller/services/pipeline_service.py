"""
Pipeline Service
Main service class that wires the simulation, analysis and fitting packages into one
pipeline per command-line subcommand.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from ModelFit import CrossoverModel, fit_crossover, fit_polarization_decay
from NoiseAnalysis import calibrate_k, sweep_crossover
from Readout import ReadoutSimulator, SimulationPlan, TelegraphModel
from Reconstruction import deconvolve_skellam, fit_mixture, husimi_normalization, husimi_q
from Sensitivity import DecayConvention, SensitivityCalculator, SqueezingSpec
from Spectroscopy import AcSignal, DdSequence, ReadoutAxis, reconstruction_axes, relaxation_comparison, simulate_tomography

from .errors import ConfigError
from .schemas import RunConfig

logger = logging.getLogger(__name__)


@dataclass
class PipelineOutput:
    """
    Everything one pipeline produced.

    ``failure`` holds the reason when a numerical step failed after its data was produced;
    the tables are still written so the failure can be inspected.
    """

    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    documents: Dict[str, Dict] = field(default_factory=dict)
    failure: Optional[str] = None


class PipelineService:
    """
    Runs the pipelines behind the command line.

    The simulator is shared by every readout pipeline; its worker count never changes results.
    """

    def __init__(
        self,
        simulator: Optional[ReadoutSimulator] = None,
        progress: bool = False,
        dump_raw: bool = False,
    ):
        """
        Args:
            simulator: Shot simulator. If None, a single-threaded one is created.
            progress: Show tqdm bars on long sweeps.
            dump_raw: Also emit the raw per-shot counts of the crossover sweep.
        """
        self.simulator = simulator or ReadoutSimulator(progress=progress)
        self.progress = progress
        self.dump_raw = dump_raw
        self._pipelines: Dict[str, Callable[[RunConfig], PipelineOutput]] = {
            "crossover": self.crossover,
            "rabi": self.rabi,
            "t1-decay": self.t1_decay,
            "dd-spec": self.dd_spec,
            "reconstruct": self.reconstruct,
            "sensitivity": self.sensitivity,
            "calibrate-apd": self.calibrate_apd,
        }

    @property
    def commands(self) -> List[str]:
        return list(self._pipelines)

    def run(self, command: str, config: RunConfig) -> PipelineOutput:
        """
        Check the blocks ``command`` needs and run its pipeline.

        Raises:
            ConfigError: Unknown command or missing block.
            NumericalError: A numerical step failed before any output existed.
        """
        if command not in self._pipelines:
            raise ConfigError(f"unknown command '{command}'", path="command")
        config.require(command)
        logger.info("running %s with seed %d", command, config.seed)
        return self._pipelines[command](config)

    @staticmethod
    def _plan(config: RunConfig, m: int = 1) -> SimulationPlan:
        simulation = config.simulation
        return SimulationPlan(
            cfg=config.ensemble,
            m=m,
            shots=simulation.shots,
            seed=config.seed,
            active_fraction=simulation.active_fraction,
            telegraph=simulation.telegraph,
            apd=simulation.apd,
        )

    @staticmethod
    def _telegraph(plan: SimulationPlan, command: str) -> TelegraphModel:
        model = TelegraphModel.from_plan(plan)
        if not model.single_mode:
            logger.warning(
                "%s: telegraph topology %r with zero_rate_factor %g does not relax as one exponential; "
                "fitted parameters will be biased",
                command, model.topology, model.zero_rate_factor,
            )
        return model

    # ----- Readout pipelines -----

    def crossover(self, config: RunConfig) -> PipelineOutput:
        block, cfg = config.crossover, config.ensemble
        plan = self._plan(config)
        self._telegraph(plan, "crossover")
        curve = sweep_crossover(
            self.simulator, plan, block.m_values, k=block.k, estimate_contrast=block.estimate_contrast,
            progress=self.progress,
        )
        fit = fit_crossover(curve, CrossoverModel(contrast=cfg.contrast, species=cfg.species))

        output = PipelineOutput(tables={"curve": curve.to_frame()})
        output.documents["fit"] = {
            **fit.to_dict(),
            "contrast": cfg.contrast,
            "spin": cfg.species.spin,
            "injected": {"n_nv": cfg.n_nv, "n_t1": cfg.decay_counts},
        }
        if self.dump_raw:
            # same (seed, point, shot) streams as the sweep
            for index, m in enumerate(block.m_values):
                batch = self.simulator.simulate_experiment(plan.model_copy(update={"m": m}), point=index)
                output.tables[f"raw_m{m}"] = batch.to_frame()
            output.documents["raw_manifest"] = {
                "plan": plan.model_dump(mode="json"),
                "m_values": list(block.m_values),
                "files": [f"raw_m{m}" for m in block.m_values],
            }
        if not fit.converged:
            output.failure = f"crossover fit did not converge: {fit.message}"
        return output

    def rabi(self, config: RunConfig) -> PipelineOutput:
        block = config.rabi
        angles = np.radians(block.angles_deg)
        points = self.simulator.run_rabi_sequence(self._plan(config, m=block.m), angles, bins=block.bins)

        summary = pd.DataFrame(
            [
                {
                    "angle": point.angle,
                    "angle_deg": math.degrees(point.angle),
                    "mean": point.mean,
                    "sigma": point.sigma_prime,
                    "err": point.sigma_err,
                    "latent_sigma": point.latent_sigma,
                    "sigma_spin": point.sigma_spin,
                }
                for point in points
            ]
        )
        histograms = pd.DataFrame(
            [
                {"angle": point.angle, "bin_left": left, "bin_right": right, "count": int(count)}
                for point in points
                for count, left, right in zip(point.counts, point.edges[:-1], point.edges[1:])
            ]
        )
        return PipelineOutput(tables={"rabi": summary, "rabi_hist": histograms})

    def t1_decay(self, config: RunConfig) -> PipelineOutput:
        block, cfg = config.t1_decay, config.ensemble
        plan = self._plan(config)
        telegraph = self._telegraph(plan, "t1-decay")
        points = self.simulator.run_t1_sequence(plan, block.level, block.m_values, block.source)
        frame = pd.DataFrame([point._asdict() for point in points], columns=["m", "p_obs", "err"])

        p_ss = telegraph.steady_state_polarization
        fit = fit_polarization_decay([tuple(point) for point in points], p_ss=p_ss)
        output = PipelineOutput(tables={"decay": frame})
        output.documents["fit"] = {
            **fit.to_dict(),
            "p_ss": p_ss,
            "single_mode": telegraph.single_mode,
            "level": block.level,
            "source": block.source,
            "injected": {"m_t1": cfg.decay_repetitions},
        }
        if not fit.converged:
            output.failure = f"polarization decay fit did not converge: {fit.message}"
        return output

    def calibrate_apd(self, config: RunConfig) -> PipelineOutput:
        block = config.calibrate_apd
        rows, calibrations = [], []
        for detector in block.detectors:
            batches = []
            for index, m in enumerate(block.m_values):
                plan = self._plan(config, m=m).model_copy(update={"shots": block.shots, "apd": detector})
                batch = self.simulator.simulate_experiment(plan, point=index)
                batches.append(batch)
                n = float(np.mean(batch.baseline))
                rows.append(
                    {
                        "mode": detector.mode,
                        "k_setting": detector.k,
                        "dead_time": detector.dead_time,
                        "m": m,
                        "n": n,
                        "reference_width": float(np.std(batch.r1 - batch.r2, ddof=1)) / n,
                        "reference_variance_ratio": float(np.var(batch.r1 - batch.r2, ddof=1)) / (2.0 * n),
                    }
                )
            calibration = calibrate_k(batches)
            logger.info("%s detector: k = %.4f +- %.4f", detector.mode, calibration.k, calibration.err)
            calibrations.append({"detector": detector.model_dump(), **calibration.model_dump()})
        return PipelineOutput(
            tables={"calibration": pd.DataFrame(rows)},
            documents={"calibration": {"calibrations": calibrations}},
        )

    # ----- Spectroscopy and reconstruction -----

    def dd_spec(self, config: RunConfig) -> PipelineOutput:
        block, cfg = config.dd_spec, config.ensemble
        signal = AcSignal(b_osc=block.b_osc, f=block.f)
        if block.tau is None:
            sequence = DdSequence.resonant(signal, n_pulses=block.n_pulses)
        else:
            sequence = DdSequence(n_pulses=block.n_pulses, tau=block.tau)
        axes = ["X", "Y", "Z"] if block.axes == "xyz" else reconstruction_axes()

        result = simulate_tomography(
            sequence, signal, axes, cfg, shots=block.shots, seed=config.seed, k1=block.k1, m=block.m,
            convention=block.convention, bins=block.bins, progress=self.progress,
        )
        output = PipelineOutput(tables={"ddspec": result.to_frame(), "histograms": result.histograms_frame()})
        output.documents["histograms"] = {
            **result.metadata(),
            "tau": sequence.tau,
            "tau_sens": sequence.tau_sens,
        }
        if block.relaxation_times:
            output.tables["relaxation"] = relaxation_comparison(
                cfg, block.relaxation_times, shots=block.shots, seed=config.seed
            )
        return output

    @staticmethod
    def _read_histograms(directory: Path) -> pd.DataFrame:
        csv_path = directory / "histograms.csv"
        if csv_path.is_file():
            return pd.read_csv(csv_path)
        records_path = directory / "histograms.records.json"
        if records_path.is_file():
            return pd.DataFrame(json.loads(records_path.read_text(encoding="utf-8")))
        raise ConfigError(f"no histograms.csv in {directory}", path="reconstruct.input")

    def reconstruct(self, config: RunConfig) -> PipelineOutput:
        block = config.reconstruct
        directory = Path(block.input)
        metadata_path = directory / "histograms.json"
        if not metadata_path.is_file():
            raise ConfigError(f"no histograms.json in {directory}", path="reconstruct.input")
        metadata = json.loads(metadata_path.read_text(encoding="utf-8"))
        frame = self._read_histograms(directory)

        try:
            n, contrast, k = float(metadata["n"]), float(metadata["contrast"]), float(metadata["k"])
            n_spins = int(metadata["n_spins"])
            axis_specs = metadata["axes"]
        except KeyError as exc:
            raise ConfigError(f"histograms.json lacks {exc}", path="reconstruct.input") from exc

        marginals = []
        for name, spec in axis_specs.items():
            rows = frame[frame["axis"] == name]
            if rows.empty:
                raise ConfigError(f"no histogram rows for axis {name}", path="reconstruct.input")
            edges = np.append(rows["bin_left"].to_numpy(dtype=float), float(rows["bin_right"].iloc[-1]))
            axis = ReadoutAxis(name=name, theta=spec["theta"], phi=spec["phi"])
            marginals.append(
                deconvolve_skellam(
                    rows["count"].to_numpy(dtype=float), edges, n, contrast, n_spins, k=k, axis=axis,
                    rabi_borders=block.rabi_borders, kernel=block.kernel,
                )
            )
        flagged = [marginal.axis.name for marginal in marginals if marginal.low_confidence]
        if flagged:
            logger.warning("low-confidence marginals: %s", flagged)

        mixture = fit_mixture(
            marginals,
            n_components=block.n_components,
            delta_phi_step_deg=block.delta_phi_step_deg,
            theta_range_deg=block.theta_range_deg,
            theta_step_deg=block.theta_step_deg,
            a_therm_step=block.a_therm_step,
            refine=block.refine,
            progress=self.progress,
        )

        thetas = np.linspace(0.0, math.pi, block.husimi_theta)
        phis = np.linspace(0.0, 2.0 * math.pi, block.husimi_phi, endpoint=False)
        grid_theta, grid_phi = np.meshgrid(thetas, phis, indexing="ij")
        q = husimi_q(mixture, grid_theta, grid_phi, include_thermal=True)
        husimi = pd.DataFrame({"theta": grid_theta.ravel(), "phi": grid_phi.ravel(), "q": q.ravel()})

        document = {
            "mixture": mixture.to_dict(),
            "coherent_weight": husimi_normalization(mixture),
            "marginals": [marginal.to_dict() for marginal in marginals],
            "low_confidence_axes": flagged,
        }
        return PipelineOutput(tables={"husimi": husimi}, documents={"mixture": document})

    # ----- Sensitivity -----

    def sensitivity(self, config: RunConfig) -> PipelineOutput:
        block = config.sensitivity
        squeezing = (
            SqueezingSpec.from_db(block.squeezing_db, mode=block.squeezing_mode) if block.squeezing_db > 0 else None
        )
        calculator = SensitivityCalculator(block.params, block.convention)
        sensitivity_map = calculator.sensitivity_map(block.tau_sens, block.m_values, squeezing, progress=self.progress)

        report = calculator.report(block.report_tau_sens, squeezing)
        try:
            report["breakeven_tau_sens"] = calculator.breakeven_tau_sens(squeezing=squeezing)
        except ValueError as exc:
            logger.warning("no breakeven sensing time: %s", exc)
            report["breakeven_tau_sens"] = None

        other = next(convention for convention in DecayConvention if convention is not calculator.convention)
        report["alternative_convention"] = SensitivityCalculator(block.params, other).report(
            block.report_tau_sens, squeezing
        )
        return PipelineOutput(tables={"map": sensitivity_map.to_frame()}, documents={"optimizer": report})
