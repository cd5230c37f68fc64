"""
Ensemble Statistics
Exports the ensemble types and the closed-form noise statistics.
"""

from .ensemble_statistics import (
    RelaxationStatistics,
    binning_factor,
    decay_factor,
    initial_amplitude,
    mean_decay,
    polarization_under_readout,
    projection_noise,
    projection_noise_model,
    projection_noise_unnormalized,
    shot_noise_prime,
    steady_state_polarization,
    relaxation_statistics,
    thermal_sigma0,
)
from .models import (
    BINNED_STEADY_STATE,
    CorrelationFunction,
    EnsembleConfig,
    PolarizationState,
    SpinSpecies,
)

__all__ = [
    'BINNED_STEADY_STATE',
    'CorrelationFunction',
    'EnsembleConfig',
    'PolarizationState',
    'SpinSpecies',
    'RelaxationStatistics',
    'binning_factor',
    'decay_factor',
    'initial_amplitude',
    'mean_decay',
    'polarization_under_readout',
    'projection_noise',
    'projection_noise_model',
    'projection_noise_unnormalized',
    'shot_noise_prime',
    'steady_state_polarization',
    'relaxation_statistics',
    'thermal_sigma0',
]
