"""Run outputs: flat-binary field snapshots with JSON sidecars, and the
RFC-4180 diagnostics CSV."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .diagnostics import DiagnosticsRecord
from .spectral import Grid

__all__ = [
    "write_snapshot",
    "read_snapshot",
    "DiagnosticsWriter",
    "diagnostics_columns",
]


def write_snapshot(directory, name: str, f: np.ndarray, grid: Grid, t: float,
                   chart_index: int, index: int) -> Path:
    """Dump one field as 64-bit little-endian floats, x-fastest, plus sidecar.

    Vector fields are written one component per file (name suffixed _0.._2).
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    f = np.asarray(f, dtype=float)
    comps = f[None] if f.ndim == 3 else f
    paths = []
    for ci, comp in enumerate(comps):
        stem = f"{name}_{ci}" if f.ndim == 4 else name
        base = directory / f"{stem}_{index:06d}"
        # array axes are (x, y, z); transpose so x varies fastest on disk
        comp.T.astype("<f8").tofile(base.with_suffix(".bin"))
        sidecar = {
            "field": stem,
            "n": grid.n,
            "L": grid.length,
            "t": t,
            "chart_index": chart_index,
            "dtype": "<f8",
            "order": "x-fastest",
        }
        base.with_suffix(".json").write_text(json.dumps(sidecar, indent=1))
        paths.append(base)
    return paths[0]


def read_snapshot(json_path) -> tuple[np.ndarray, dict]:
    json_path = Path(json_path)
    meta = json.loads(json_path.read_text())
    raw = np.fromfile(json_path.with_suffix(".bin"), dtype="<f8")
    n = meta["n"]
    return raw.reshape(n, n, n).T, meta


def diagnostics_columns(mode: str, n_loops: int = 3, n_dist: int = 4) -> list:
    if mode == "picard":
        return ["iteration", "residual"]
    cols = list(DiagnosticsRecord.SCALAR_FIELDS)
    cols += [f"circulation_{i}" for i in range(n_loops)]
    cols += [f"distribution_{i}" for i in range(n_dist)]
    if mode == "oracle_compare":
        cols.append("oracle_l2_diff")
    return cols


class DiagnosticsWriter:
    """CSV emitter; column set is a function of the run mode only."""

    def __init__(self, path, mode: str, n_loops: int = 3, n_dist: int = 4):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "w", newline="")
        self._csv = csv.writer(self._fh)
        self.columns = diagnostics_columns(mode, n_loops, n_dist)
        self._csv.writerow(self.columns)

    def write(self, rec: DiagnosticsRecord, extra: dict | None = None):
        row = [getattr(rec, k) for k in DiagnosticsRecord.SCALAR_FIELDS]
        row += list(rec.circulations)
        row += list(rec.distribution_check)
        for col in self.columns[len(row):]:
            row.append((extra or {}).get(col, ""))
        self._csv.writerow([_fmt(v) for v in row])
        self._fh.flush()

    def write_row(self, values):
        self._csv.writerow([_fmt(v) for v in values])
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.17g}"
    return v
