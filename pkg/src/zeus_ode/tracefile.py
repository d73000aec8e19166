"""Binary trace files holding per-step denoiser outputs.

Layout (little-endian throughout):

    magic   4 bytes  b"ZTRC"
    version u32      currently 1
    T       u32      number of records
    d       u64      flattened output dimension
    dtype   u32      0 = float32 payload
    records T x [ step u32 | s f64 | psi f32[d] ]

Step indices are strictly decreasing in file order (sampling order, t = T
down to 1).  Payloads are float32; timestamps are float64.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from zeus_ode.errors import TraceFormatError
from zeus_ode.oracle import DenoiserHandle, TraceRecord
from zeus_ode.parameterization import Parameterization

MAGIC = b"ZTRC"
VERSION = 1
DTYPE_F32 = 0

_HEADER = struct.Struct("<4sIIQI")
_REC_HEAD = struct.Struct("<Id")


def write_trace(path: str | Path, records: Sequence[TraceRecord] | Iterable[TraceRecord]) -> None:
    records = list(records)
    if not records:
        raise TraceFormatError("refusing to write an empty trace")
    d = len(records[0].psi)
    steps = [r.step for r in records]
    if any(b >= a for a, b in zip(steps, steps[1:])):
        raise TraceFormatError("step indices must be strictly decreasing")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, len(records), d, DTYPE_F32))
        for rec in records:
            psi = np.ascontiguousarray(rec.psi, dtype=np.float32)
            if psi.shape != (d,):
                raise TraceFormatError(f"record dim {psi.shape} != ({d},)")
            fh.write(_REC_HEAD.pack(rec.step, rec.s))
            fh.write(psi.tobytes())


def read_records(path: str | Path) -> list[TraceRecord]:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise TraceFormatError("file shorter than header")
    magic, version, T, d, dtype = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise TraceFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise TraceFormatError(f"unsupported version {version}")
    if dtype != DTYPE_F32:
        raise TraceFormatError(f"unsupported dtype tag {dtype}")
    rec_size = _REC_HEAD.size + 4 * d
    expected = _HEADER.size + T * rec_size
    if len(raw) != expected:
        raise TraceFormatError(f"file size {len(raw)} != expected {expected} (truncated?)")
    records = []
    off = _HEADER.size
    prev_step = None
    for _ in range(T):
        step, s = _REC_HEAD.unpack_from(raw, off)
        off += _REC_HEAD.size
        psi = np.frombuffer(raw, dtype="<f4", count=d, offset=off).copy()
        off += 4 * d
        if prev_step is not None and step >= prev_step:
            raise TraceFormatError(f"step indices not strictly decreasing: {prev_step} -> {step}")
        prev_step = step
        records.append(TraceRecord(step=step, s=s, psi=psi))
    return records


def read_trace(path: str | Path, parameterization: Parameterization) -> DenoiserHandle:
    """Open a trace as a replaying denoiser handle."""
    return DenoiserHandle(
        kind="recorded",
        parameterization=parameterization,
        records=read_records(path),
    )
