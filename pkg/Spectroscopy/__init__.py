"""
Spectroscopy
Exports the XY8 sensing model and the tomography simulation.
"""

from .dd_signal import (
    EnsembleMoments,
    MarginalMoments,
    accumulated_phase,
    detuning_response,
    ensemble_moments,
    interaction_strength,
    marginal_moments,
)
from .models import (
    GAMMA_E,
    AcSignal,
    DdSequence,
    InteractionStrength,
    ReadoutAxis,
    SincConvention,
    reconstruction_axes,
)
from .tomography import (
    AxisReadout,
    TomographyResult,
    common_drive_decay_time,
    common_drive_mean,
    correlated_vs_uncorrelated_t1,
    relaxation_comparison,
    simulate_tomography,
)

__all__ = [
    'GAMMA_E',
    'AcSignal',
    'AxisReadout',
    'DdSequence',
    'EnsembleMoments',
    'InteractionStrength',
    'MarginalMoments',
    'ReadoutAxis',
    'SincConvention',
    'TomographyResult',
    'accumulated_phase',
    'common_drive_decay_time',
    'common_drive_mean',
    'correlated_vs_uncorrelated_t1',
    'detuning_response',
    'ensemble_moments',
    'interaction_strength',
    'marginal_moments',
    'reconstruction_axes',
    'relaxation_comparison',
    'simulate_tomography',
]
