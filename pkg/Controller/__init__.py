"""
Controller
Command-line front end of the readout toolkit.
"""

__version__ = "0.1.0"

__all__ = ['__version__']
