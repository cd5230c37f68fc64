"""
Model Fit
Exports the fit result type, the nonlinear fits and the linear estimates.
"""

from .fit_result import FitResult
from .linear_fits import (
    CARBON_DENSITY_PER_NM3,
    GeometricEstimate,
    fit_emission_linear,
    fit_tomography_scale,
    geometric_nv_estimate,
)
from .nonlinear_fits import CrossoverModel, crossover_model, fit_crossover, fit_polarization_decay

__all__ = [
    'CARBON_DENSITY_PER_NM3',
    'CrossoverModel',
    'FitResult',
    'GeometricEstimate',
    'crossover_model',
    'fit_crossover',
    'fit_emission_linear',
    'fit_polarization_decay',
    'fit_tomography_scale',
    'geometric_nv_estimate',
]
