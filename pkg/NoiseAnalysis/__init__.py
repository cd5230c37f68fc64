"""
Noise Analysis
Exports the width decomposition, k calibration and crossover sweep.
"""

from .models import CrossoverCurve, CrossoverPoint, KCalibration, NoiseDecomposition
from .noise_decomposition import calibrate_k, decompose, sweep_crossover

__all__ = [
    'CrossoverCurve',
    'CrossoverPoint',
    'KCalibration',
    'NoiseDecomposition',
    'calibrate_k',
    'decompose',
    'sweep_crossover',
]
