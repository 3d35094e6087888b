"""File formats: KPF1 field snapshots, diagnostics/spectrum CSV, verify JSON.

KPF1 layout (little endian): magic 'KPF1', u32 nx, u32 ny, f64 Lx,
f64 lambda_y, f64 t, then nx*ny f64 samples with the x index varying
fastest.  Floats in text outputs are written with repr, so identical runs
produce byte-identical files.
"""

from __future__ import annotations

import json
import struct
from typing import Iterable

import numpy as np

from .errors import FormatError
from .solver import DiagnosticsRecord
from .soliton import SpectrumResult
from .spectral import Grid, RealField

__all__ = [
    "read_field",
    "write_diagnostics_csv",
    "write_field",
    "write_report_json",
    "write_spectrum_csv",
]

_MAGIC = b"KPF1"
_HEADER = struct.Struct("<II ddd")

DIAGNOSTIC_COLUMNS = ("t", "mass", "energy", "hamiltonian_c", "energy_norm", "linf",
                      "orbital_distance")


def write_field(path: str, field: RealField, t: float = 0.0) -> None:
    g = field.grid
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(_HEADER.pack(g.nx, g.ny, g.length_x, g.lambda_y, t))
        fh.write(np.ascontiguousarray(field.values.flatten(order="F")).tobytes())


def read_field(path: str) -> tuple[RealField, float]:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {_MAGIC!r}")
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise FormatError(f"{path}: truncated header")
        nx, ny, length_x, lambda_y, t = _HEADER.unpack(header)
        payload = fh.read(8 * nx * ny)
        if len(payload) != 8 * nx * ny:
            raise FormatError(f"{path}: truncated payload, expected {nx * ny} samples")
        if fh.read(1):
            raise FormatError(f"{path}: trailing bytes after payload")
    flat = np.frombuffer(payload, dtype="<f8")
    values = flat.reshape((nx, ny), order="F")
    return RealField(Grid(nx, ny, length_x, lambda_y), values), t


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def write_diagnostics_csv(path: str, records: Iterable[DiagnosticsRecord]) -> None:
    lines = [",".join(DIAGNOSTIC_COLUMNS)]
    for r in records:
        lines.append(",".join([
            _fmt(r.t), _fmt(r.mass), _fmt(r.energy), _fmt(r.hamiltonian_c),
            _fmt(r.energy_norm), _fmt(r.linf), _fmt(r.orbital_distance),
        ]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_spectrum_csv(path: str, results: Iterable[SpectrumResult]) -> None:
    lines = ["c,min_eigenvalue,error_estimate,grid_n"]
    for r in results:
        lines.append(f"{_fmt(r.c)},{_fmt(r.min_eigenvalue)},{_fmt(r.error_estimate)},{r.grid_n}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_report_json(path: str, report: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
