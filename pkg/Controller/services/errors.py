"""
Pipeline Errors
Exceptions the command line maps onto its exit codes.
"""

from __future__ import annotations

from typing import List

from pydantic import ValidationError


class ConfigError(ValueError):
    """Invalid or incomplete run configuration (exit code 2)."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class NumericalError(RuntimeError):
    """A numerical step failed badly enough to abort the pipeline (exit code 3)."""


def validation_error_lines(exc: ValidationError, prefix: str = "") -> List[str]:
    """One ``loc: msg`` line per pydantic error, loc as a dotted key path."""
    lines = []
    for error in exc.errors():
        loc = ".".join(str(part) for part in error["loc"])
        if prefix:
            loc = f"{prefix}.{loc}" if loc else prefix
        lines.append(f"{loc}: {error['msg']}")
    return lines
