"""Serialization of radial and box fields.

Binary container layout (all little-endian):
    magic   4 bytes  b"DCNF"
    version u32      currently 1
    kind    u32      1 = radial, 2 = box
    d       u32      spatial dimension
    n       u64      point count (radial) or points per axis (box)
    extent  f64      r_max (radial) or half-width L (box)
    payload complex64 samples, C order

CSV export is provided for small grids and is meant for human inspection,
not round-tripping at full precision.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grids import BoxField, BoxGrid, Field, RadialField, RadialGrid

MAGIC = b"DCNF"
VERSION = 1
_KIND_RADIAL = 1
_KIND_BOX = 2
_HEADER = struct.Struct("<4sIIIQd")


def write_field(path: str | Path, u: Field) -> None:
    if isinstance(u, RadialField):
        kind, n, extent = _KIND_RADIAL, u.grid.n, u.grid.r_max
    elif isinstance(u, BoxField):
        kind, n, extent = _KIND_BOX, u.grid.n, u.grid.L
    else:
        raise TypeError(f"cannot serialize {type(u).__name__}")
    header = _HEADER.pack(MAGIC, VERSION, kind, u.grid.d, n, extent)
    payload = np.ascontiguousarray(u.values, dtype="<c8").tobytes()
    Path(path).write_bytes(header + payload)


def read_field(path: str | Path) -> Field:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, kind, d, n, extent = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    payload = np.frombuffer(raw, dtype="<c8", offset=_HEADER.size)
    if kind == _KIND_RADIAL:
        if payload.size != n:
            raise ValueError(f"{path}: payload size mismatch")
        return RadialField(RadialGrid(d, extent, n), payload.astype(np.complex128))
    if kind == _KIND_BOX:
        if payload.size != n**d:
            raise ValueError(f"{path}: payload size mismatch")
        values = payload.astype(np.complex128).reshape((n,) * d)
        return BoxField(BoxGrid(d, extent, n), values)
    raise ValueError(f"{path}: unknown field kind {kind}")


def write_field_csv(path: str | Path, u: RadialField) -> None:
    if not isinstance(u, RadialField):
        raise TypeError("CSV export supports radial fields only")
    rows = ["r,re,im"]
    for r, v in zip(u.grid.nodes, u.values):
        rows.append(f"{r!r},{v.real!r},{v.imag!r}")
    Path(path).write_text("\n".join(rows) + "\n")
