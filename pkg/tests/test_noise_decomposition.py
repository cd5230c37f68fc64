from __future__ import annotations

import math

import numpy as np
import pytest
from pydantic import ValidationError

from Ensemble import EnsembleConfig, projection_noise, shot_noise_prime
from NoiseAnalysis import CrossoverCurve, CrossoverPoint, calibrate_k, decompose, sweep_crossover
from Readout import (
    ApdSettings,
    DeadTimeApd,
    ReadoutRecord,
    ReadoutSimulator,
    SimulationPlan,
    TelegraphSettings,
)

LOW_FLUX_PHOTONS_PER_UNIT = 0.2728
LOW_FLUX_DECAY_COUNTS = 1.6e6


def _low_flux_plan(n_nv: int = 31, shots: int = 3000, photons_per_unit: float = LOW_FLUX_PHOTONS_PER_UNIT,
                 decay_counts: float = LOW_FLUX_DECAY_COUNTS, **overrides) -> SimulationPlan:
    cfg = EnsembleConfig(n_nv=n_nv, contrast=0.15, photons_per_unit=photons_per_unit, decay_counts=decay_counts)
    return SimulationPlan(cfg=cfg, m=1250, shots=shots, seed=2025, **overrides)


def _reference_batches(apd: ApdSettings, m_values=(50, 200, 1000), shots: int = 3000):
    simulator = ReadoutSimulator()
    plan = _low_flux_plan(n_nv=10, shots=shots, photons_per_unit=10.0, apd=apd)
    return [simulator.simulate_experiment(plan.model_copy(update={"m": m}), point=i) for i, m in enumerate(m_values)]


def test_pure_shot_records_have_no_projection_noise() -> None:
    plan = _low_flux_plan(shots=3000, sequence="polarized", telegraph=TelegraphSettings(pinned=True))
    batch = ReadoutSimulator().simulate_experiment(plan.model_copy(update={"m": 5000}))
    result = decompose(batch, contrast=0.15)
    assert abs(result.sigma_prime - result.sigma_shot_prime) < 3 * result.sigma_prime_err


def test_plateau_and_db_gap_at_largest_photon_number() -> None:
    plan = _low_flux_plan(shots=5000, apd=ApdSettings(mode="multiplicative_k", k=0.99))
    batch = ReadoutSimulator(threads=2).simulate_experiment(plan.model_copy(update={"m": 25_000}))
    result = decompose(batch, k=0.99, contrast=0.15)
    assert result.sigma_proj == pytest.approx(0.0847, rel=0.05)
    assert result.db_gap == pytest.approx(3.76, abs=0.4)
    assert result.sigma_prime == pytest.approx(0.99 * math.hypot(result.sigma_shot_prime, result.sigma_proj))


def test_contrast_estimate_and_degenerate_records() -> None:
    records = [ReadoutRecord(a=925.0, b=925.0, r1=1000.0, r2=1000.0, m=1) for _ in range(4)]
    result = decompose(records)
    assert result.c == pytest.approx(0.15)
    assert result.degenerate
    assert math.isnan(result.sigma_prime_err)


def test_decompose_rejects_single_record() -> None:
    with pytest.raises(ValueError):
        decompose([ReadoutRecord(a=1.0, b=2.0, r1=3.0, r2=3.0, m=1)])


def test_decomposition_is_permutation_invariant() -> None:
    batch = ReadoutSimulator().simulate_experiment(_low_flux_plan(shots=500))
    order = np.random.default_rng(1).permutation(len(batch))
    shuffled = batch.with_counts(a=batch.a[order], b=batch.b[order], r1=batch.r1[order], r2=batch.r2[order])
    original, permuted = decompose(batch), decompose(shuffled)
    assert permuted.sigma_prime == pytest.approx(original.sigma_prime, rel=1e-12)
    assert permuted.c == pytest.approx(original.c, rel=1e-12)


def test_calibrate_k_linear_detector() -> None:
    calibration = calibrate_k(_reference_batches(ApdSettings(mode="linear")))
    assert calibration.k == pytest.approx(1.0, abs=0.02)
    assert abs(calibration.k - 1.0) < 3 * calibration.err
    assert not calibration.single_n


def test_calibrate_k_recovers_multiplicative_factor() -> None:
    calibration = calibrate_k(_reference_batches(ApdSettings(mode="multiplicative_k", k=0.89)))
    assert abs(calibration.k - 0.89) < 3 * calibration.err


def test_calibrate_k_single_photon_number_is_flagged() -> None:
    batches = _reference_batches(ApdSettings(mode="linear"), m_values=(200,), shots=1000)
    calibration = calibrate_k(batches)
    assert calibration.single_n
    assert calibration.err > 0.02


def test_dead_time_lowers_calibrated_k_monotonically() -> None:
    estimates = []
    for dead_time in (0.0, 0.1, 0.3, 0.6):
        batches = _reference_batches(ApdSettings(mode="dead_time", dead_time=dead_time), m_values=(100, 1000))
        estimates.append(calibrate_k(batches).k)
    assert all(later < earlier for earlier, later in zip(estimates, estimates[1:]))


def test_matched_dead_time_calibrates_like_multiplicative_k() -> None:
    matched = DeadTimeApd.matched_to(0.89).dead_time
    dead = calibrate_k(_reference_batches(ApdSettings(mode="dead_time", dead_time=matched)))
    multiplicative = calibrate_k(_reference_batches(ApdSettings(mode="multiplicative_k", k=0.89)))
    assert dead.k == pytest.approx(multiplicative.k, abs=0.03)


def test_crossover_shot_limited_regime_scales_as_inverse_root_n() -> None:
    plan = _low_flux_plan(n_nv=1000, shots=3000, photons_per_unit=0.01, decay_counts=1e12)
    curve = sweep_crossover(ReadoutSimulator(), plan, [1000, 2000, 4000, 8000])
    constant = math.sqrt(1.0 - 0.15 / 2.0) * math.sqrt(2.0) / (2.0 * 0.15)
    for point in curve.points:
        assert abs(point.sigma_prime * math.sqrt(point.n) - constant) < 4 * point.err * math.sqrt(point.n)


def test_crossover_projection_limited_regime_reaches_plateau() -> None:
    plan = _low_flux_plan(shots=3000, photons_per_unit=10.0, decay_counts=1e12)
    curve = sweep_crossover(ReadoutSimulator(), plan, [30_000])
    plateau = projection_noise(plan.cfg, curve.points[0].n)
    assert curve.points[0].sigma_prime == pytest.approx(plateau, rel=0.05)


def test_crossover_round_trip_against_projection_noise() -> None:
    plan = _low_flux_plan(shots=3000)
    curve = sweep_crossover(ReadoutSimulator(threads=2), plan, [1250, 5000, 25_000])
    gaps = []
    for point in curve.points:
        decomposition = point.decomposition
        expected = projection_noise(plan.cfg, point.n)
        assert abs(decomposition.sigma_proj - expected) < 4 * decomposition.sigma_proj_err
        gaps.append(decomposition.db_gap)
    assert all(later > earlier for earlier, later in zip(gaps, gaps[1:]))
    frame = curve.to_frame()
    assert list(frame.columns[:4]) == ["m", "n", "sigma_prime", "err"]


def test_plateaus_order_inversely_with_count() -> None:
    plateaus = []
    for n_nv in (170, 31, 14):
        plan = _low_flux_plan(n_nv=n_nv, shots=1500, photons_per_unit=10.0, decay_counts=1e12)
        curve = sweep_crossover(ReadoutSimulator(), plan, [20_000])
        plateaus.append(curve.points[0].decomposition.sigma_proj)
    assert plateaus[0] < plateaus[1] < plateaus[2]


def test_crossover_curve_requires_increasing_n() -> None:
    points = [CrossoverPoint(m=2, n=20.0, sigma_prime=0.1, err=0.01), CrossoverPoint(m=1, n=10.0, sigma_prime=0.2, err=0.01)]
    with pytest.raises(ValidationError):
        CrossoverCurve(points=points)


def test_shot_noise_prime_reference_value() -> None:
    assert shot_noise_prime(6820.0, 0.15) == pytest.approx(0.05490, abs=1e-4)
