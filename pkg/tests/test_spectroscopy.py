from __future__ import annotations

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.optimize import brentq

from Ensemble import EnsembleConfig, shot_noise_prime
from ModelFit import fit_tomography_scale
from Spectroscopy import (
    AcSignal,
    DdSequence,
    ReadoutAxis,
    SincConvention,
    accumulated_phase,
    common_drive_mean,
    correlated_vs_uncorrelated_t1,
    detuning_response,
    ensemble_moments,
    interaction_strength,
    marginal_moments,
    reconstruction_axes,
    relaxation_comparison,
    simulate_tomography,
)

MEASURED_SIGNAL = AcSignal(b_osc=1.84e-6, f=250e3)


def _ensemble(n_nv: int = 26, photons_per_unit: float = 1e5) -> EnsembleConfig:
    return EnsembleConfig(n_nv=n_nv, contrast=0.15, photons_per_unit=photons_per_unit, decay_counts=1e12)


def test_interaction_strength_of_measured_field() -> None:
    seq = DdSequence.resonant(MEASURED_SIGNAL, n_pulses=8)
    strength = interaction_strength(seq, MEASURED_SIGNAL)
    assert seq.tau == pytest.approx(2e-6)
    assert strength.alpha == pytest.approx(3.30, abs=0.01)
    assert strength.alpha_prime == pytest.approx(strength.alpha)


def test_accumulated_phase_limits() -> None:
    seq = DdSequence.resonant(MEASURED_SIGNAL, n_pulses=16)
    alpha = interaction_strength(seq, MEASURED_SIGNAL).alpha
    assert accumulated_phase(seq, MEASURED_SIGNAL, 0.0) == 0.0
    assert accumulated_phase(seq, MEASURED_SIGNAL, math.pi / 2) == pytest.approx(alpha)
    lam = np.linspace(0, 2 * math.pi, 7)
    assert np.allclose(accumulated_phase(seq, MEASURED_SIGNAL, lam), alpha * np.sin(lam))


def test_sequence_requires_whole_xy8_blocks() -> None:
    with pytest.raises(ValidationError):
        DdSequence(n_pulses=12, tau=2e-6)


@pytest.mark.parametrize("convention", list(SincConvention))
def test_detuned_strength_never_exceeds_resonant(convention: SincConvention) -> None:
    tau0 = MEASURED_SIGNAL.tau0
    for tau in np.linspace(0.5 * tau0, 1.5 * tau0, 101):
        seq = DdSequence(n_pulses=8, tau=float(tau))
        strength = interaction_strength(seq, MEASURED_SIGNAL, convention)
        assert abs(strength.alpha_prime) <= abs(strength.alpha) + 1e-12


@pytest.mark.parametrize("convention", [SincConvention.RESONANT_SPACING, SincConvention.FILTER])
def test_detuning_response_is_even(convention: SincConvention) -> None:
    tau0 = MEASURED_SIGNAL.tau0
    offsets = np.linspace(0.0, 0.4 * tau0, 41)
    above = detuning_response(tau0 + offsets, tau0, 8, convention)
    below = detuning_response(tau0 - offsets, tau0, 8, convention)
    assert np.allclose(above, below, atol=1e-12)
    assert detuning_response(tau0, tau0, 8, convention) == 1.0


def test_marginal_moments_limits() -> None:
    assert tuple(marginal_moments(0.0)) == pytest.approx((0.0, 0.5, 0.0, 0.0))
    far = marginal_moments(1e6)
    assert far.sigma_x == pytest.approx(0.5 * math.sqrt(0.5), abs=1e-3)


def test_mean_y_crosses_zero_at_first_bessel_root() -> None:
    root = brentq(lambda a: marginal_moments(a).mean_y, 2.0, 3.0)
    assert root == pytest.approx(2.40483, abs=1e-3)


@pytest.mark.parametrize("alpha_prime", [0.5, 1.0, 2.0, 3.0, 5.0])
def test_marginal_moments_match_random_phase_sampling(alpha_prime: float) -> None:
    rng = np.random.default_rng(int(alpha_prime * 10))
    samples = 1_000_000
    theta = alpha_prime * np.sin(rng.uniform(0, 2 * math.pi, samples))
    expected = marginal_moments(alpha_prime)
    for values, mean, sigma in (
        (np.sin(theta) / 2, expected.mean_x, expected.sigma_x),
        (np.cos(theta) / 2, expected.mean_y, expected.sigma_y),
    ):
        centered = values - values.mean()
        variance = values.var()
        variance_err = math.sqrt(max(np.mean(centered**4) - variance**2, 1e-30) / samples)
        assert abs(values.mean() - mean) < 4 * math.sqrt(variance / samples) + 1e-12
        assert abs(variance - sigma**2) < 4 * variance_err + 1e-12


def test_off_resonance_keeps_y_polarization() -> None:
    silent = AcSignal(b_osc=0.0, f=250e3)
    seq = DdSequence.resonant(silent)
    result = simulate_tomography(seq, silent, ["X", "Y", "Z"], _ensemble(), shots=2000, seed=1)
    assert np.all(result.axes["Y"].spin_counts == 26)
    assert result.axes["Y"].mean == pytest.approx(0.5, abs=0.005)
    thermal = 0.5 / math.sqrt(26)
    for name in ("X", "Z"):
        readout = result.axes[name]
        assert abs(readout.mean) < 4 * math.hypot(thermal, 0.02) / math.sqrt(2000)
        assert readout.latent_sigma == pytest.approx(thermal, rel=0.1)


def test_on_resonance_destroys_y_polarization_and_matches_moments() -> None:
    seq = DdSequence.resonant(MEASURED_SIGNAL)
    cfg = _ensemble()
    shots = 4000
    result = simulate_tomography(seq, MEASURED_SIGNAL, ["X", "Y", "Z"], cfg, shots=shots, seed=2)
    moments = ensemble_moments(result.alpha_prime, cfg.n_nv)
    shot = shot_noise_prime(result.n, cfg.contrast)
    assert abs(result.axes["Y"].mean) < 0.25
    for name, mean, sigma in (
        ("X", moments.mean_x, moments.sigma_x),
        ("Y", moments.mean_y, moments.sigma_y),
        ("Z", moments.mean_z, moments.sigma_z),
    ):
        readout = result.axes[name]
        expected_width = math.hypot(sigma, shot)
        assert abs(readout.mean - mean) < 4 * expected_width / math.sqrt(shots)
        assert abs(readout.sigma_prime - expected_width) < 4 * readout.err + 0.01 * expected_width
    thermal = 0.5 / math.sqrt(cfg.n_nv)
    assert result.axes["X"].latent_sigma > 2 * thermal
    assert result.axes["Y"].latent_sigma > 2 * thermal


def test_readout_scale_recovered_from_tomography() -> None:
    seq = DdSequence.resonant(MEASURED_SIGNAL)
    cfg = _ensemble(photons_per_unit=2e4)
    result = simulate_tomography(seq, MEASURED_SIGNAL, ["X", "Y", "Z"], cfg, shots=4000, seed=3, k1=0.7)
    moments = ensemble_moments(result.alpha_prime, cfg.n_nv)
    shot = shot_noise_prime(result.n, cfg.contrast)
    rows = [
        (result.axes[name].sigma_prime, shot, sigma, result.axes[name].err)
        for name, sigma in (("X", moments.sigma_x), ("Y", moments.sigma_y), ("Z", moments.sigma_z))
    ]
    fit = fit_tomography_scale(rows)
    assert abs(fit.params["k1"] - 0.7) < 3 * fit.errors["k1"]


def test_tomography_is_reproducible_and_exports_tables() -> None:
    seq = DdSequence.resonant(MEASURED_SIGNAL)
    axes = reconstruction_axes()
    first = simulate_tomography(seq, MEASURED_SIGNAL, axes, _ensemble(), shots=200, seed=9, bins=21)
    second = simulate_tomography(seq, MEASURED_SIGNAL, axes, _ensemble(), shots=200, seed=9, bins=21)
    for name in first.axes:
        assert np.array_equal(first.axes[name].values, second.axes[name].values)
    assert len(first.to_frame()) == 10
    assert len(first.histograms_frame()) == 10 * 21
    assert set(first.metadata()["axes"]) == {axis.name for axis in axes}


def test_reconstruction_axes_layout() -> None:
    axes = reconstruction_axes()
    assert axes[0] == ReadoutAxis.z()
    assert [round(math.degrees(axis.phi), 6) for axis in axes[1:]] == pytest.approx(list(np.linspace(-90, 90, 9)))
    assert all(axis.is_equatorial for axis in axes[1:])


def test_common_drive_mean_is_one_over_e_at_unit_time() -> None:
    frame = correlated_vs_uncorrelated_t1(_ensemble(n_nv=31), "common_drive", [0.0, 1.0], shots=4000, seed=4)
    assert frame["sigma"].iloc[0] == 0.0
    assert frame["mean"].iloc[1] == pytest.approx(math.exp(-1) / 2, abs=4 * frame["mean_err"].iloc[1])
    assert common_drive_mean(0.0) == 1.0


def test_correlated_noise_exceeds_independent_relaxation() -> None:
    times = [0.0, 0.5, 1.0, 2.0, 3.0, 4.0]
    frame = relaxation_comparison(_ensemble(n_nv=31), times, shots=2000, seed=5)
    late = frame[frame["time"] >= 2.0]
    combined = np.hypot(late["sigma_err_common"], late["sigma_err_independent"])
    assert np.all(late["sigma_common"] - late["sigma_independent"] > 3 * combined)
    final = frame.iloc[-1]
    assert abs(final["sigma_independent"] - final["thermal"]) < 4 * final["sigma_err_independent"]
    assert np.all(frame["sigma_independent"] <= frame["thermal"] + 4 * frame["sigma_err_independent"])
