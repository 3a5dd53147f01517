"""CSV and JSON result files with full-precision floats."""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from wentzell.constants import FLOAT_FORMAT, REPORT_SCHEMA_VERSION
from wentzell.fem.mesh import Mesh
from wentzell.models import EnergyLedger, Trajectory

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """Convert dataclasses, numpy values and enums to JSON-ready builtins.

    Non-finite floats become the strings "inf", "-inf" and "nan".
    """
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(value, Path):
        return str(value)
    return value


class ResultWriter:
    """Write run artefacts into one output directory.

    CSV floats use 17 significant digits so that every value round-trips.
    """

    def __init__(self, out_dir: str | Path) -> None:
        self._out_dir = Path(out_dir)
        self._out_dir.mkdir(parents=True, exist_ok=True)

    @property
    def out_dir(self) -> Path:
        return self._out_dir

    def write_frame(self, name: str, frame: pd.DataFrame, *, index: bool = True) -> Path:
        path = self._out_dir / name
        frame.to_csv(path, float_format=FLOAT_FORMAT, index=index, lineterminator="\n")
        logger.info("Wrote %d rows to %s", len(frame), path)
        return path

    def write_trajectory(self, traj: Trajectory) -> Path:
        return self.write_frame("trajectory.csv", traj.to_frame())

    def write_ledger(self, ledger: EnergyLedger) -> Path:
        return self.write_frame("ledger.csv", ledger.to_frame())

    def write_vertices(self, mesh: Mesh) -> Path:
        coords = {"x": mesh.vertices[:, 0]}
        if mesh.dim == 2:
            coords["y"] = mesh.vertices[:, 1]
        frame = pd.DataFrame(coords)
        frame["boundary"] = np.isin(np.arange(mesh.n_vertices), mesh.boundary_vertices).astype(int)
        frame.index.name = "vertex"
        return self.write_frame("vertices.csv", frame)

    def write_report(self, name: str, payload: dict[str, Any]) -> Path:
        path = self._out_dir / name
        body = {"schema_version": REPORT_SCHEMA_VERSION, **to_jsonable(payload)}
        path.write_text(json.dumps(body, indent=2, sort_keys=True, allow_nan=False) + "\n")
        logger.info("Wrote report %s", path)
        return path
