"""Binary field snapshots.

Layout, little-endian throughout::

    b"CLFD"  version:u32  k:u32  has_time:u8  n:u32
    extents:u64[ndim]  spacings:f64[ndim]  periodic:u8[ndim]
    n x (length:u32, utf-8 name)
    payload: f64[n * prod(extents)]   row-major [component][t][x1]..[xk]
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grid import Field, Grid

MAGIC = b"CLFD"
VERSION = 1


class SnapshotError(ValueError):
    pass


def encode(field: Field) -> bytes:
    g = field.grid
    parts = [MAGIC, struct.pack("<IIBI", VERSION, g.spatial_dims, int(g.has_time), field.n_components)]
    parts.append(struct.pack(f"<{g.ndim}Q", *g.extents))
    parts.append(struct.pack(f"<{g.ndim}d", *g.spacings))
    parts.append(struct.pack(f"<{g.ndim}B", *(int(p) for p in g.periodic)))
    for name in field.component_names:
        raw = name.encode("utf-8")
        parts.append(struct.pack("<I", len(raw)) + raw)
    parts.append(np.ascontiguousarray(field.values, dtype="<f8").tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data, self.pos = data, 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise SnapshotError("malformed snapshot: truncated header")
        out = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return out

    def raw(self, size: int) -> bytes:
        if self.pos + size > len(self.data):
            raise SnapshotError("malformed snapshot: truncated header")
        out = self.data[self.pos:self.pos + size]
        self.pos += size
        return out


def decode(data: bytes) -> Field:
    if data[:4] != MAGIC:
        raise SnapshotError("malformed snapshot: bad magic (expected 'CLFD')")
    r = _Reader(data)
    r.pos = 4
    version, k, has_time, n = r.take("<IIBI")
    if version != VERSION:
        raise SnapshotError(f"malformed snapshot: unsupported version {version}")
    if k not in (1, 2, 3) or has_time not in (0, 1) or n < 1:
        raise SnapshotError(f"malformed snapshot: bad header (k={k}, has_time={has_time}, n={n})")
    ndim = k + has_time
    extents = r.take(f"<{ndim}Q")
    spacings = r.take(f"<{ndim}d")
    periodic = r.take(f"<{ndim}B")
    names = []
    for _ in range(n):
        (length,) = r.take("<I")
        try:
            names.append(r.raw(length).decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise SnapshotError("malformed snapshot: component name is not UTF-8") from exc
    count = n * int(np.prod(extents, dtype=np.uint64))
    if len(data) - r.pos != 8 * count:
        raise SnapshotError(f"malformed snapshot: payload holds {len(data) - r.pos} bytes, "
                            f"expected {8 * count}")
    try:
        grid = Grid(k, bool(has_time), tuple(int(e) for e in extents), tuple(spacings),
                    tuple(bool(p) for p in periodic))
        values = np.frombuffer(data, dtype="<f8", offset=r.pos).astype(np.float64)
        return Field(grid, values.reshape((n,) + grid.shape), names)
    except ValueError as exc:
        raise SnapshotError(f"malformed snapshot: {exc}") from exc


def save(field: Field, path) -> None:
    Path(path).write_bytes(encode(field))


def load(path) -> Field:
    return decode(Path(path).read_bytes())
