"""
Readout Simulation
Exports ReadoutSimulator plus the telegraph, detector and sequence building blocks.
"""

from .apd import ApdModel, DeadTimeApd, LinearApd, MultiplicativeApd
from .models import (
    COUNT_COLUMNS,
    ApdSettings,
    ReadoutBatch,
    ReadoutRecord,
    SimulationPlan,
    TelegraphSettings,
)
from .readout_simulator import DecayPoint, RabiPoint, ReadoutSimulator, photon_counts, shot_rng
from .relaxation import simulate_relaxation_statistics
from .sequence_interface import ReadoutSequence
from .sequences import SEQUENCES, build_sequence
from .telegraph import LEVEL_INDEX, TelegraphModel, TelegraphPath

__all__ = [
    'ApdModel',
    'ApdSettings',
    'COUNT_COLUMNS',
    'DeadTimeApd',
    'DecayPoint',
    'LEVEL_INDEX',
    'LinearApd',
    'MultiplicativeApd',
    'RabiPoint',
    'ReadoutBatch',
    'ReadoutRecord',
    'ReadoutSequence',
    'ReadoutSimulator',
    'SEQUENCES',
    'SimulationPlan',
    'TelegraphModel',
    'TelegraphPath',
    'TelegraphSettings',
    'build_sequence',
    'photon_counts',
    'shot_rng',
    'simulate_relaxation_statistics',
]
