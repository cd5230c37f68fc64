"""
Ensemble Model Classes
"""

from .ensemble_config import (
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
]
