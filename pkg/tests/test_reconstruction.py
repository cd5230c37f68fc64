from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest
from scipy.stats import binom

from Ensemble import EnsembleConfig
from Readout import photon_counts
from Reconstruction import (
    CoherentStateMixture,
    DickeBasis,
    MarginalDistribution,
    SpinCoherentState,
    coherent_overlap,
    deconvolve_skellam,
    fit_mixture,
    husimi_normalization,
    husimi_q,
    marginal_of_mixture,
    skellam_kernel,
    thermal_marginal,
    wigner_small_d,
)
from Spectroscopy import AcSignal, DdSequence, ReadoutAxis, reconstruction_axes, simulate_tomography

J = 13.0
N_SPINS = 26
CONTRAST = 0.15
TILTED = ReadoutAxis(name="tilted", theta=1.1, phi=-0.4)


def _delta(index: int, dimension: int = N_SPINS + 1) -> MarginalDistribution:
    probabilities = np.zeros(dimension)
    probabilities[index] = 1.0
    return MarginalDistribution(axis=ReadoutAxis.z(), probabilities=probabilities)


def _with_counts(marginals, counts: float = 1e4):
    return [dataclasses.replace(marginal, counts=counts) for marginal in marginals]


def test_dicke_basis_layout() -> None:
    basis = DickeBasis.for_spins(N_SPINS)
    assert basis.dimension == 27
    assert basis.m_values[0] == -J and basis.m_values[-1] == J
    with pytest.raises(ValueError):
        DickeBasis(0.3)


def test_coherent_state_is_normalized() -> None:
    state = SpinCoherentState(J, theta=1.2, phi=0.8)
    assert np.sum(np.abs(state.amplitudes) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_overlap_of_identical_and_antipodal_states() -> None:
    state = SpinCoherentState(J, theta=0.9, phi=2.1)
    assert coherent_overlap(state, state) == pytest.approx(1.0, abs=1e-12)
    north = SpinCoherentState(J, theta=0.0)
    south = SpinCoherentState(J, theta=math.pi)
    assert abs(coherent_overlap(north, south)) < 1e-12


def test_overlap_of_orthogonal_equatorial_directions() -> None:
    first = SpinCoherentState(J, theta=math.pi / 2, phi=0.0)
    second = SpinCoherentState(J, theta=math.pi / 2, phi=math.pi / 2)
    overlap = coherent_overlap(first, second)
    assert abs(overlap) ** 2 == pytest.approx(0.5**26, rel=1e-10)
    assert abs(overlap) ** 2 == pytest.approx(1.49e-8, rel=1e-2)
    direct = np.vdot(first.amplitudes, second.amplitudes)
    assert direct == pytest.approx(overlap, abs=1e-12)


def test_overlap_rejects_different_blocks() -> None:
    with pytest.raises(ValueError):
        coherent_overlap(SpinCoherentState(J, 0.5), SpinCoherentState(J + 1, 0.5))


@pytest.mark.parametrize("j", [0.5, 1.0, 13.0, 100.0])
def test_wigner_small_d_is_orthogonal(j: float) -> None:
    d = wigner_small_d(j, 0.7)
    assert np.allclose(d.T @ d, np.eye(d.shape[0]), atol=1e-10)


def test_coherent_state_along_its_own_axis_is_a_delta() -> None:
    along_y = CoherentStateMixture(j=J, delta_phi=0.0)
    for method in ("binomial", "wigner"):
        marginal = marginal_of_mixture(along_y, ReadoutAxis.y(), method=method)
        assert marginal.probabilities[-1] == pytest.approx(1.0, abs=1e-10)
        assert marginal.mean() == pytest.approx(J, abs=1e-8)


def test_equatorial_state_measured_along_z_is_binomial() -> None:
    marginal = marginal_of_mixture(CoherentStateMixture(j=J, delta_phi=0.0), ReadoutAxis.z())
    expected = binom.pmf(np.arange(N_SPINS + 1), N_SPINS, 0.5)
    assert np.allclose(marginal.probabilities, expected, atol=1e-12)


def test_wigner_rotation_matches_binomial_marginal() -> None:
    mixture = CoherentStateMixture(j=J, delta_phi=math.radians(40), theta=1.2, a_therm=0.2)
    for axis in (ReadoutAxis.x(), ReadoutAxis.y(), ReadoutAxis.z(), TILTED):
        binomial = marginal_of_mixture(mixture, axis, method="binomial")
        rotated = marginal_of_mixture(mixture, axis, method="wigner")
        assert np.allclose(binomial.probabilities, rotated.probabilities, atol=1e-10)


def test_thermal_mixture_marginal_is_axis_independent() -> None:
    thermal = CoherentStateMixture(j=J, delta_phi=math.radians(30), a_therm=1.0)
    uniform = np.full(N_SPINS + 1, 1.0 / (N_SPINS + 1))
    for axis in (ReadoutAxis.x(), ReadoutAxis.z(), TILTED):
        assert np.allclose(marginal_of_mixture(thermal, axis).probabilities, uniform, atol=1e-12)


def test_equatorial_fan_is_symmetric_along_z() -> None:
    fan = CoherentStateMixture.equatorial_fan(J, math.radians(60), a_therm=0.1)
    probabilities = marginal_of_mixture(fan, ReadoutAxis.z()).probabilities
    assert np.allclose(probabilities, probabilities[::-1], atol=1e-12)


def test_marginal_distribution_validation() -> None:
    with pytest.raises(ValueError):
        MarginalDistribution(axis=ReadoutAxis.z(), probabilities=np.array([0.7, 0.7]))
    with pytest.raises(ValueError):
        MarginalDistribution(axis=ReadoutAxis.z(), probabilities=np.array([1.2, -0.2]))
    assert _delta(3).total_variation(_delta(4)) == 1.0


def test_deconvolution_recovers_a_delta_from_its_skellam_image() -> None:
    n = 1e5
    edges = np.linspace(-0.6, 0.6, 241)
    kernel = skellam_kernel(edges, n, CONTRAST, N_SPINS)
    counts = 1e4 * kernel[:, 20]
    marginal = deconvolve_skellam(counts, edges, n, CONTRAST, N_SPINS)
    assert marginal.total_variation(_delta(20)) < 0.05
    assert np.all(marginal.probabilities >= 0)
    assert marginal.probabilities.sum() == pytest.approx(1.0, abs=1e-9)
    assert marginal.counts == pytest.approx(counts.sum())


def test_deconvolution_is_identity_without_photon_noise() -> None:
    edges = (np.arange(N_SPINS + 2) - 0.5) / N_SPINS - 0.5
    counts = np.random.default_rng(3).integers(0, 50, N_SPINS + 1).astype(float)
    counts[0] = 7.0
    marginal = deconvolve_skellam(counts, edges, 1e12, CONTRAST, N_SPINS)
    assert np.allclose(marginal.probabilities, counts / counts.sum(), atol=1e-9)


def test_deconvolution_recovers_thermal_marginal_from_shots() -> None:
    rng = np.random.default_rng(11)
    n, shots = 1e5, 20000
    up = rng.binomial(N_SPINS, 1.0 / 3.0, shots)
    a, b, _, _ = photon_counts(rng, n, CONTRAST, up / N_SPINS)
    values = (b - a) / (2.0 * n * CONTRAST)
    counts, edges = np.histogram(values, bins=np.linspace(-0.6, 0.6, 121))
    marginal = deconvolve_skellam(counts, edges, n, CONTRAST, N_SPINS)
    reference = MarginalDistribution(axis=ReadoutAxis.z(), probabilities=thermal_marginal(N_SPINS))
    assert marginal.total_variation(reference) < 0.1


def test_deconvolution_flags_noise_wider_than_histogram() -> None:
    edges = np.linspace(-0.5, 0.5, 11)
    marginal = deconvolve_skellam(np.ones(10), edges, 10.0, CONTRAST, N_SPINS)
    assert marginal.low_confidence
    assert np.allclose(marginal.probabilities, 1.0 / (N_SPINS + 1))


def test_unit_rabi_borders_match_gaussian_kernel() -> None:
    n = 1e5
    edges = np.linspace(-0.6, 0.6, 121)
    counts = 1e4 * skellam_kernel(edges, n, CONTRAST, N_SPINS) @ thermal_marginal(N_SPINS)
    plain = deconvolve_skellam(counts, edges, n, CONTRAST, N_SPINS, kernel="gaussian")
    bordered = deconvolve_skellam(counts, edges, n, CONTRAST, N_SPINS, rabi_borders=(-0.5, 0.5))
    assert np.allclose(plain.probabilities, bordered.probabilities, atol=1e-12)
    with pytest.raises(ValueError):
        deconvolve_skellam(counts, edges, n, CONTRAST, N_SPINS, rabi_borders=(0.5, -0.5))


def test_deconvolution_rejects_empty_histogram() -> None:
    with pytest.raises(ValueError):
        deconvolve_skellam(np.zeros(4), np.linspace(-0.5, 0.5, 5), 1e5, CONTRAST, N_SPINS)


def test_fit_recovers_mixture_from_its_own_marginals() -> None:
    truth = CoherentStateMixture(j=J, delta_phi=math.radians(60), theta=math.pi / 2, a_therm=0.3)
    marginals = _with_counts([marginal_of_mixture(truth, axis) for axis in reconstruction_axes()])
    fitted = fit_mixture(marginals, delta_phi_step_deg=5, theta_step_deg=5, a_therm_step=0.05)
    assert math.degrees(fitted.delta_phi) == pytest.approx(60, abs=5)
    assert math.degrees(fitted.theta) == pytest.approx(90, abs=5)
    assert fitted.a_therm == pytest.approx(0.3, abs=0.05)
    assert fitted.extra["identifiable"]
    assert fitted.extra["log_likelihood"] >= fitted.extra["grid_log_likelihood"]


def test_fit_of_polarized_data_collapses_the_fan() -> None:
    polarized = CoherentStateMixture(j=J, delta_phi=0.0)
    marginals = _with_counts([marginal_of_mixture(polarized, axis) for axis in reconstruction_axes()])
    fitted = fit_mixture(marginals, delta_phi_step_deg=5, theta_step_deg=5, a_therm_step=0.05)
    assert math.degrees(fitted.delta_phi) < 2.0
    assert fitted.a_therm < 0.02


def test_single_axis_fit_is_flagged() -> None:
    truth = CoherentStateMixture(j=J, delta_phi=math.radians(30))
    marginals = _with_counts([marginal_of_mixture(truth, ReadoutAxis.z())])
    fitted = fit_mixture(marginals, delta_phi_step_deg=10, theta_step_deg=10, a_therm_step=0.1, refine=False)
    assert not fitted.extra["identifiable"]


def test_on_resonance_tomography_reconstructs_a_delocalized_state() -> None:
    signal = AcSignal(b_osc=1.84e-6, f=250e3)
    cfg = EnsembleConfig(n_nv=N_SPINS, contrast=CONTRAST, photons_per_unit=1e5, decay_counts=1e12)
    result = simulate_tomography(
        DdSequence.resonant(signal), signal, reconstruction_axes(), cfg, shots=2000, seed=6, bins=61
    )
    marginals = [
        deconvolve_skellam(
            readout.counts, readout.edges, result.n, result.contrast, result.n_spins,
            k=result.signal_scale, axis=readout.axis,
        )
        for readout in result.axes.values()
    ]
    fitted = fit_mixture(marginals, delta_phi_step_deg=5, theta_step_deg=5, a_therm_step=0.05)
    assert math.degrees(fitted.delta_phi) > 45.0


def test_husimi_peak_and_antipode() -> None:
    along_y = CoherentStateMixture(j=J, delta_phi=0.0)
    assert husimi_q(along_y, math.pi / 2, math.pi / 2) == pytest.approx(1.0 / math.pi, abs=1e-9)
    assert husimi_q(along_y, math.pi / 2, -math.pi / 2) == pytest.approx(0.0, abs=1e-12)
    thermal_offset = husimi_q(
        CoherentStateMixture(j=J, delta_phi=0.0, a_therm=0.5), math.pi / 2, -math.pi / 2, include_thermal=True
    )
    assert thermal_offset == pytest.approx(0.5 / (math.pi * (N_SPINS + 1)), rel=1e-9)


def test_husimi_maximum_sits_on_the_state_direction() -> None:
    state = CoherentStateMixture(j=J, delta_phi=0.0, theta=1.0, center_phi=0.7)
    thetas = np.linspace(0.0, math.pi, 91)
    phis = np.linspace(-math.pi, math.pi, 181)
    grid_theta, grid_phi = np.meshgrid(thetas, phis, indexing="ij")
    q = husimi_q(state, grid_theta, grid_phi)
    row, col = np.unravel_index(np.argmax(q), q.shape)
    assert abs(thetas[row] - 1.0) <= thetas[1] - thetas[0]
    assert abs(phis[col] - 0.7) <= phis[1] - phis[0]


def test_husimi_normalization_equals_coherent_weight() -> None:
    mixture = CoherentStateMixture(j=J, delta_phi=math.radians(60), a_therm=0.3)
    assert husimi_normalization(mixture) == pytest.approx(0.7, rel=1e-3)
