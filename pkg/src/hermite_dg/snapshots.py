"""Plain-text snapshot and diagnostics-CSV files with exact roundtrip.

Floats are written with shortest-roundtrip decimals (repr), so
write -> read -> write reproduces identical bytes.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

import numpy as np

from .diagnostics import CSV_COLUMNS, DiagnosticsRecord
from .errors import ConfigError
from .hermite import ScalingState
from .mesh import build_mesh
from .rhs import KineticState

_HEADER_FLOATS = ("t", "alpha", "alpha0", "gamma", "L", "v_max")
_HEADER_INTS = ("Nx", "N", "k")
_HEADER_STRS = ("scenario", "scenario_hash")


def _fmt(x: float) -> str:
    return repr(float(x))


def write_snapshot(path, state: KineticState, scenario: str = "",
                   scenario_hash: str = "", v_max: float = 8.0) -> None:
    """Write header lines `key value`, a `data` marker, then one row per
    (mode, cell) holding the k+1 cell coefficients."""
    s = state.scaling
    lines = [
        f"scenario {scenario or 'unknown'}",
        f"scenario_hash {scenario_hash or 'unknown'}",
        f"t {_fmt(s.t)}",
        f"alpha {_fmt(s.alpha)}",
        f"alpha0 {_fmt(s.alpha0)}",
        f"gamma {_fmt(s.gamma)}",
        f"L {_fmt(state.mesh.L)}",
        f"v_max {_fmt(v_max)}",
        f"Nx {state.mesh.Nx}",
        f"N {state.n_modes}",
        f"k {state.k}",
        "data",
    ]
    for n in range(state.n_modes):
        for j in range(state.mesh.Nx):
            row = " ".join(_fmt(c) for c in state.coeffs[n, j])
            lines.append(f"{n} {j} {row}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_snapshot(path) -> tuple[KineticState, dict]:
    """Rebuild the state (uniform mesh) and return the header as a dict."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    header: dict = {}
    idx = 0
    for idx, line in enumerate(lines):
        if line.strip() == "data":
            break
        key, _, raw = line.partition(" ")
        if key in _HEADER_FLOATS:
            header[key] = float(raw)
        elif key in _HEADER_INTS:
            header[key] = int(raw)
        else:
            header[key] = raw.strip()
    else:
        raise ConfigError(f"snapshot {path}: missing data section")
    for key in _HEADER_FLOATS + _HEADER_INTS:
        if key not in header:
            raise ConfigError(f"snapshot {path}: missing header key {key}")

    N, Nx, k = header["N"], header["Nx"], header["k"]
    coeffs = np.empty((N, Nx, k + 1))
    rows = lines[idx + 1:]
    expected = N * Nx
    filled = 0
    for row in rows:
        if not row.strip():
            continue
        parts = row.split()
        if len(parts) != 2 + k + 1:
            raise ConfigError(f"snapshot {path}: malformed row: {row!r}")
        n, j = int(parts[0]), int(parts[1])
        coeffs[n, j] = [float(p) for p in parts[2:]]
        filled += 1
    if filled != expected:
        raise ConfigError(f"snapshot {path}: expected {expected} rows, found {filled}")

    mesh = build_mesh(header["L"], Nx)
    scaling = ScalingState(header["alpha0"], header["gamma"],
                           header["alpha"], header["t"])
    return KineticState(coeffs, mesh, k, scaling), header


class DiagnosticsCSV:
    """Streaming sink writing one CSV row per diagnostics record."""

    def __init__(self, path):
        self._fh = open(path, "w", encoding="utf-8", newline="\n")
        self._fh.write(",".join(CSV_COLUMNS) + "\n")

    def __call__(self, rec: DiagnosticsRecord) -> None:
        values = [getattr(rec, col) for col in CSV_COLUMNS]
        self._fh.write(",".join(_fmt(v) for v in values) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_diagnostics_csv(path) -> list[DiagnosticsRecord]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split(",") != list(CSV_COLUMNS):
        raise ConfigError(f"{path}: not a diagnostics CSV")
    records = []
    for line in lines[1:]:
        if not line.strip():
            continue
        vals = [float(p) for p in line.split(",")]
        records.append(DiagnosticsRecord(**dict(zip(CSV_COLUMNS, vals))))
    return records
