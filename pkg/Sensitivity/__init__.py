"""
Sensitivity
Exports the conventional versus repetitive readout sensitivity calculator.
"""

from .models import DecayConvention, SensitivityParams, SqueezingSpec
from .sensitivity_calculator import MICROSECOND, OptimumPoint, SensitivityCalculator, SensitivityMap

__all__ = [
    'MICROSECOND',
    'DecayConvention',
    'OptimumPoint',
    'SensitivityCalculator',
    'SensitivityMap',
    'SensitivityParams',
    'SqueezingSpec',
]
