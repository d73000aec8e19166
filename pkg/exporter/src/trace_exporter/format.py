"""Writer/reader for the replayable trace format.

Byte layout (little-endian):

    magic   4 bytes  b"ZTRC"
    version u32      1
    T       u32      record count
    d       u64      flattened output dimension
    dtype   u32      0 = float32
    records T x [ step u32 | s f64 | psi f32[d] ]

Step indices strictly decrease in file order (sampling order).  This module
is the exporter's own implementation of the layout; the consumer validates
it independently on replay.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"ZTRC"
VERSION = 1
DTYPE_F32 = 0

_HEADER = struct.Struct("<4sIIQI")
_REC_HEAD = struct.Struct("<Id")


class TraceError(ValueError):
    pass


@dataclass
class Record:
    step: int
    s: float
    psi: np.ndarray


class TraceWriter:
    """Streams records to disk; removes the partial file on abort."""

    def __init__(self, path: str | Path, T: int, d: int):
        self.path = Path(path)
        self.T = T
        self.d = d
        self._written = 0
        self._prev_step: int | None = None
        self._fh = open(self.path, "wb")
        self._fh.write(_HEADER.pack(MAGIC, VERSION, T, d, DTYPE_F32))

    def write(self, step: int, s: float, psi: np.ndarray) -> None:
        flat = np.ascontiguousarray(psi, dtype=np.float32).reshape(-1)
        if flat.size != self.d:
            self.abort()
            raise TraceError(f"output dimension drifted: got {flat.size}, header d={self.d}")
        if self._prev_step is not None and step >= self._prev_step:
            self.abort()
            raise TraceError(f"step indices must strictly decrease: {self._prev_step} -> {step}")
        if self._written >= self.T:
            self.abort()
            raise TraceError(f"more than T={self.T} records")
        self._fh.write(_REC_HEAD.pack(step, s))
        self._fh.write(flat.tobytes())
        self._prev_step = step
        self._written += 1

    def close(self) -> None:
        if self._fh.closed:
            return
        self._fh.close()
        if self._written != self.T:
            self.path.unlink(missing_ok=True)
            raise TraceError(f"wrote {self._written} records, header promised {self.T}")

    def abort(self) -> None:
        if not self._fh.closed:
            self._fh.close()
        self.path.unlink(missing_ok=True)


def read_trace(path: str | Path) -> list[Record]:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise TraceError("short header")
    magic, version, T, d, dtype = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC or version != VERSION or dtype != DTYPE_F32:
        raise TraceError(f"bad header: magic={magic!r} version={version} dtype={dtype}")
    rec_size = _REC_HEAD.size + 4 * d
    if len(raw) != _HEADER.size + T * rec_size:
        raise TraceError("truncated trace")
    out = []
    off = _HEADER.size
    for _ in range(T):
        step, s = _REC_HEAD.unpack_from(raw, off)
        off += _REC_HEAD.size
        psi = np.frombuffer(raw, dtype="<f4", count=d, offset=off).copy()
        off += 4 * d
        out.append(Record(step=step, s=s, psi=psi))
    return out
