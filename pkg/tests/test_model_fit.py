from __future__ import annotations

import math

import numpy as np
import pytest

from Ensemble import EnsembleConfig, initial_amplitude, polarization_under_readout, shot_noise_prime
from ModelFit import (
    CrossoverModel,
    crossover_model,
    fit_crossover,
    fit_emission_linear,
    fit_polarization_decay,
    fit_tomography_scale,
    geometric_nv_estimate,
)
from NoiseAnalysis import CrossoverCurve, CrossoverPoint, sweep_crossover
from Readout import ApdSettings, ReadoutSimulator, SimulationPlan

CONTRAST = 0.15
SMALL_ENSEMBLE_N = np.geomspace(341.0, 6820.0, 8)


def _curve(n, sigma, rel_err: float) -> CrossoverCurve:
    points = [
        CrossoverPoint(m=index + 1, n=float(value), sigma_prime=float(width), err=float(rel_err * width))
        for index, (value, width) in enumerate(zip(n, sigma))
    ]
    return CrossoverCurve(points=points)


def test_crossover_model_limits() -> None:
    n = np.array([10.0, 1e7])
    widths = crossover_model(n, n_nv=31, n_t1=1e15, k=1.0, contrast=CONTRAST)
    assert widths[0] == pytest.approx(math.hypot(shot_noise_prime(10.0, CONTRAST), math.sqrt(2 / 9 / 31)))
    assert widths[1] == pytest.approx(math.sqrt(2.0 / 9.0 / 31.0), rel=1e-3)


def test_crossover_fit_coverage_over_seeded_datasets() -> None:
    truth = {"n_nv": 31.0, "k": 0.99}
    fixed = CrossoverModel(contrast=CONTRAST)
    clean = fixed.evaluate(SMALL_ENSEMBLE_N, truth["n_nv"], 1.6e6, truth["k"])
    covered = {name: 0 for name in truth}
    for seed in range(100):
        rng = np.random.default_rng(seed)
        noisy = clean * (1.0 + 0.013 * rng.standard_normal(clean.size))
        fit = fit_crossover(_curve(SMALL_ENSEMBLE_N, noisy, 0.013), fixed)
        for name, value in truth.items():
            if abs(fit.params[name] - value) <= 2.0 * fit.errors[name]:
                covered[name] += 1
    assert covered["n_nv"] >= 90
    assert covered["k"] >= 90


def test_crossover_fit_large_ensemble_regression() -> None:
    n = 1.4136 * np.array([1250, 2500, 5000, 10_000, 25_000], dtype=float)
    fixed = CrossoverModel(contrast=CONTRAST)
    clean = fixed.evaluate(n, 170.0, 582e3, 0.89)
    fit = fit_crossover(_curve(n, clean, 0.01), fixed)
    assert fit.converged
    assert fit.params["n_nv"] == pytest.approx(170.0, rel=1e-2)
    assert fit.params["k"] == pytest.approx(0.89, abs=1e-3)
    assert fit.residual_norm < 1e-3
    assert np.allclose(fit.covariance[:2, :2], fit.covariance[:2, :2].T)


def test_shot_only_curve_leaves_emitter_count_unidentifiable() -> None:
    fixed = CrossoverModel(contrast=CONTRAST)
    widths = 0.99 * np.asarray(shot_noise_prime(SMALL_ENSEMBLE_N, CONTRAST))
    fit = fit_crossover(_curve(SMALL_ENSEMBLE_N, widths, 0.01), fixed)
    assert fit.params["k"] == pytest.approx(0.99, abs=2e-3)
    assert not fit.identifiable["n_nv"]
    assert not fit.all_identifiable
    assert fit.errors["n_nv"] >= fit.params["n_nv"]


def test_crossover_fit_needs_four_points() -> None:
    fixed = CrossoverModel(contrast=CONTRAST)
    n = SMALL_ENSEMBLE_N[:3]
    with pytest.raises(ValueError):
        fit_crossover(_curve(n, fixed.evaluate(n, 31.0, 1.6e6, 0.99), 0.01), fixed)


@pytest.mark.parametrize("seed", [7, 19, 2025])
def test_crossover_fit_round_trip_on_simulated_sweep(seed: int) -> None:
    cfg = EnsembleConfig(n_nv=31, contrast=CONTRAST, photons_per_unit=0.2728, decay_counts=1.6e6)
    plan = SimulationPlan(cfg=cfg, m=1250, shots=3000, seed=seed, apd=ApdSettings(mode="multiplicative_k", k=0.99))
    m_values = [1250, 2500, 5000, 10_000, 25_000, 50_000]
    curve = sweep_crossover(ReadoutSimulator(threads=2), plan, m_values, k=0.99)
    fit = fit_crossover(curve, CrossoverModel(contrast=CONTRAST))
    assert abs(fit.params["n_nv"] - 31.0) < 3.0 * fit.errors["n_nv"]
    assert abs(fit.params["k"] - 0.99) < 3.0 * fit.errors["k"]


def _decay_data(p_init: float, m_t1: float, seed: int):
    rng = np.random.default_rng(seed)
    m = np.array([500, 2000, 5000, 10_000, 20_000, 40_000, 80_000], dtype=float)
    p = polarization_under_readout(initial_amplitude(p_init), m, m_t1)
    return [(mi, pi + 0.01 * rng.standard_normal(), 0.01) for mi, pi in zip(m, p)]


@pytest.mark.parametrize("p_init, m_t1", [(1.0, 19_430.0), (-1.0, 8392.0)])
def test_polarization_decay_fit_recovers_relaxation(p_init: float, m_t1: float) -> None:
    fit = fit_polarization_decay(_decay_data(p_init, m_t1, seed=3))
    assert fit.params["m_t1"] == pytest.approx(m_t1, rel=0.1)
    assert fit.params["p0"] == pytest.approx(initial_amplitude(p_init), abs=0.05)
    assert fit.all_identifiable


def test_polarization_decay_fit_on_simulated_relaxation() -> None:
    cfg = EnsembleConfig(n_nv=20, contrast=CONTRAST, photons_per_unit=1.0, decay_counts=19_430.0)
    plan = SimulationPlan(cfg=cfg, m=1, shots=200, seed=11)
    grid = [1000, 3000, 6000, 12_000, 20_000, 40_000, 80_000]
    points = ReadoutSimulator().run_t1_sequence(plan, "up", grid, source="latent")
    fit = fit_polarization_decay(points)
    assert fit.params["m_t1"] == pytest.approx(19_430.0, rel=0.1)


def test_constant_polarization_is_flagged() -> None:
    data = [(m, 1.0, 0.01) for m in (100.0, 500.0, 1000.0, 5000.0)]
    fit = fit_polarization_decay(data)
    assert not fit.identifiable["m_t1"]
    assert fit.params["m_t1"] > 10 * 5000.0


def test_polarization_decay_fit_is_order_invariant() -> None:
    data = _decay_data(1.0, 19_430.0, seed=5)
    forward = fit_polarization_decay(data)
    backward = fit_polarization_decay(list(reversed(data)))
    for name in forward.names:
        assert backward.params[name] == pytest.approx(forward.params[name], rel=1e-6)


def test_polarization_decay_fit_needs_three_points() -> None:
    with pytest.raises(ValueError):
        fit_polarization_decay([(1.0, 0.9, 0.01), (2.0, 0.8, 0.01)])


def test_emission_fit_on_measured_spots() -> None:
    fit = fit_emission_linear([(170, 5700), (31, 1100), (14, 850)])
    assert fit.params["slope"] == pytest.approx(31.86, abs=0.05)
    assert fit.errors["slope"] == pytest.approx(1.71, abs=0.05)
    assert fit.params["intercept"] == pytest.approx(266.6, abs=1.0)
    assert fit.errors["intercept"] == pytest.approx(171.0, abs=2.0)


def test_emission_fit_two_points_is_exact() -> None:
    fit = fit_emission_linear([(10, 100), (20, 180)])
    assert fit.residual_norm == pytest.approx(0.0, abs=1e-9)
    assert fit.params["slope"] == pytest.approx(8.0)
    assert math.isnan(fit.errors["slope"])
    assert fit.to_dict()["errors"]["slope"] is None


def test_emission_fit_rejects_identical_counts() -> None:
    with pytest.raises(ValueError):
        fit_emission_linear([(10, 100), (10, 120), (10, 110)])


def test_emission_fit_slope_recovery_on_noisy_line() -> None:
    rng = np.random.default_rng(21)
    x = np.linspace(5, 200, 12)
    y = 30.0 * x + 250.0 + rng.normal(0.0, 40.0, x.size)
    fit = fit_emission_linear(list(zip(x, y)))
    assert abs(fit.params["slope"] - 30.0) < 2.5 * fit.errors["slope"]


def test_geometric_estimate_at_quoted_parameters() -> None:
    estimate = geometric_nv_estimate()
    assert estimate.n_nv == pytest.approx(140.0, rel=0.05)
    assert estimate.n_nitrogen == pytest.approx(46_150.0, rel=0.01)
    literal = geometric_nv_estimate(spot="literal")
    assert literal.spot_diameter_nm > estimate.spot_diameter_nm
    assert geometric_nv_estimate(conversion_rate=0.0).n_nv == 0.0


def test_geometric_estimate_rejects_non_positive_inputs() -> None:
    with pytest.raises(ValueError):
        geometric_nv_estimate(numerical_aperture=0.0)


def test_tomography_scale_recovers_k1() -> None:
    rows = []
    for shot, model in [(0.05, 0.10), (0.05, 0.20), (0.04, 0.30), (0.06, 0.05)]:
        rows.append((math.sqrt(shot**2 + 0.8 * model**2), shot, model))
    fit = fit_tomography_scale(rows)
    assert fit.params["k1"] == pytest.approx(0.8, rel=1e-9)
    assert fit.identifiable["k1"]
