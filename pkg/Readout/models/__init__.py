"""
Readout Model Classes
"""

from .readout_record import COUNT_COLUMNS, ReadoutBatch, ReadoutRecord
from .simulation_plan import ApdSettings, SimulationPlan, TelegraphSettings

__all__ = [
    'ApdSettings',
    'COUNT_COLUMNS',
    'ReadoutBatch',
    'ReadoutRecord',
    'SimulationPlan',
    'TelegraphSettings',
]
