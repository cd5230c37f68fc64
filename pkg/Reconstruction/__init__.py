"""
Reconstruction
Exports the Dicke-basis state model, photon-noise deconvolution and the coherent-state
mixture fit.
"""

from .deconvolution import (
    deconvolve_skellam,
    gaussian_kernel,
    richardson_lucy,
    skellam_kernel,
    state_centers,
    thermal_marginal,
)
from .dicke import DickeBasis, SpinCoherentState, coherent_overlap, twice_j, wigner_small_d
from .mixture import (
    CoherentStateMixture,
    MarginalDistribution,
    binomial_log_pmf,
    husimi_normalization,
    husimi_q,
    marginal_of_mixture,
    sphere_integral,
)
from .mixture_fit import fit_mixture, is_identifiable, mixture_log_likelihood

__all__ = [
    'CoherentStateMixture',
    'DickeBasis',
    'MarginalDistribution',
    'SpinCoherentState',
    'binomial_log_pmf',
    'coherent_overlap',
    'deconvolve_skellam',
    'fit_mixture',
    'gaussian_kernel',
    'husimi_normalization',
    'husimi_q',
    'is_identifiable',
    'marginal_of_mixture',
    'mixture_log_likelihood',
    'richardson_lucy',
    'skellam_kernel',
    'sphere_integral',
    'state_centers',
    'thermal_marginal',
    'twice_j',
    'wigner_small_d',
]
