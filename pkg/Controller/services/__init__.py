"""
Pipeline Service
Exports PipelineService, the run-config schemas and the output writer.
"""

from .errors import ConfigError, NumericalError, validation_error_lines
from .output_writer import OutputWriter
from .pipeline_service import PipelineOutput, PipelineService
from .schemas import REQUIRED_BLOCKS, RunConfig, load_run_config

__all__ = [
    'ConfigError',
    'NumericalError',
    'OutputWriter',
    'PipelineOutput',
    'PipelineService',
    'REQUIRED_BLOCKS',
    'RunConfig',
    'load_run_config',
    'validation_error_lines',
]
