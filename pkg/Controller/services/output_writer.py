"""
Output Writer
Writes pipeline tables and documents with a provenance sidecar next to each file.
"""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal

import numpy as np
import pandas as pd
import pydantic
import scipy

from Controller import __version__

logger = logging.getLogger(__name__)

TABLE_SUFFIX = {"csv": ".csv", "json": ".records.json"}


def _plain(value: Any) -> Any:
    """JSON-safe copy: numpy scalars and arrays unwrapped, non-finite floats as null."""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def dumps(document: Any) -> str:
    return json.dumps(_plain(document), indent=2, sort_keys=True, allow_nan=False) + "\n"


class OutputWriter:
    """
    Writes into one output directory for one command run.

    Every file X gets X.meta.json with the command, seed, config hash and library versions.
    Nothing time dependent goes into any file, so identical runs produce identical bytes.
    """

    def __init__(
        self,
        out_dir: Path,
        command: str,
        seed: int,
        config_sha256: str,
        fmt: Literal["csv", "json"] = "csv",
    ):
        self.out_dir = Path(out_dir)
        self.command = command
        self.seed = seed
        self.config_sha256 = config_sha256
        self.fmt = fmt
        self.written: List[Path] = []

    def _sidecar(self, path: Path) -> Dict:
        return {
            "file": path.name,
            "command": self.command,
            "seed": self.seed,
            "config_sha256": self.config_sha256,
            "version": __version__,
            "versions": {
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "pandas": pd.__version__,
                "pydantic": pydantic.VERSION,
            },
        }

    def _finish(self, path: Path) -> Path:
        meta = path.with_name(path.name + ".meta.json")
        meta.write_text(dumps(self._sidecar(path)), encoding="utf-8", newline="\n")
        self.written.append(path)
        logger.info("wrote %s", path)
        return path

    def write_table(self, name: str, frame: pd.DataFrame) -> Path:
        """CSV with '.' decimal and '\\n' endings, or records JSON under ``--format json``."""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / f"{name}{TABLE_SUFFIX[self.fmt]}"
        if self.fmt == "csv":
            frame.to_csv(path, index=False, lineterminator="\n", decimal=".", encoding="utf-8")
        else:
            path.write_text(dumps(frame.to_dict(orient="records")), encoding="utf-8", newline="\n")
        return self._finish(path)

    def write_document(self, name: str, document: Dict) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / f"{name}.json"
        path.write_text(dumps(document), encoding="utf-8", newline="\n")
        return self._finish(path)
