"""Deterministic CSV and JSON writers.

Numbers are written with 12 significant digits. Every CSV gets a JSON sidecar
(``<name>.json``) holding the resolved parameters that produced it.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .dynamics import Trajectory
from .model import PulseSet

__all__ = ["fmt", "write_csv", "write_json", "write_trajectory", "write_envelopes", "jsonable"]


def fmt(x) -> str:
    return f"{float(x):.12g}"


def jsonable(obj):
    """Plain JSON structure for dataclasses, enums and numpy values."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(asdict(obj))
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, data) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(jsonable(data), indent=2, sort_keys=True) + "\n")
    return path


def write_csv(path, header, rows, params=None) -> Path:
    """Write ``rows`` of numbers; ``params`` goes to the JSON sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])
    if params is not None:
        write_json(path.with_suffix(".json"), params)
    return path


def write_trajectory(path, traj: Trajectory, params=None) -> Path:
    """Columns ``t, rho_1 .. rho_n, norm`` (levels numbered from 1)."""
    n = traj.dimension
    header = ["t"] + [f"rho_{i + 1}" for i in range(n)] + ["norm"]
    pops = traj.populations
    rows = np.column_stack([traj.times, pops, traj.norms])
    return write_csv(path, header, rows, params)


def write_envelopes(path, pulses: PulseSet, times, params=None) -> Path:
    """Columns ``t, Omega_1 .. Omega_k``."""
    times = np.asarray(times, dtype=float)
    vals = pulses.values(times)
    header = ["t"] + [f"Omega_{i + 1}" for i in range(vals.shape[1])]
    return write_csv(path, header, np.column_stack([times, vals]), params)
