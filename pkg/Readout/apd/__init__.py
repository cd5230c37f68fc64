"""
APD Model Classes
"""

from .apd_model import ApdModel
from .dead_time_apd import DeadTimeApd
from .linear_apd import LinearApd
from .multiplicative_apd import MultiplicativeApd

__all__ = ['ApdModel', 'DeadTimeApd', 'LinearApd', 'MultiplicativeApd']
