"""Raw binary field dumps.

Layout, all little-endian: the magic bytes ``STAF``, a u32 format version, u32
``nx, ny, nz``, an f64 time, then six planes of f64 samples in the order
E_x, E_y, E_z, B_x, B_y, B_z.  Each plane is stored with x varying fastest,
then y, then z.
"""
import struct

import numpy as np

from . import convention
from .errors import RawFormatError
from .fields import FieldState

MAGIC = b"STAF"
VERSION = 1
_HEADER = struct.Struct("<4sIIIId")


def encode(state: FieldState) -> bytes:
    nz, ny, nx = state.grid_shape
    planes = np.concatenate([state.E, state.B]).astype("<f8")
    return _HEADER.pack(MAGIC, VERSION, nx, ny, nz, float(state.time)) + planes.tobytes(order="C")


def decode(data: bytes) -> FieldState:
    """Parse a dump back into an evolved-provenance state (no time levels)."""
    if len(data) < _HEADER.size:
        raise RawFormatError("file shorter than the header")
    magic, version, nx, ny, nz, time = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise RawFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise RawFormatError(f"unsupported version {version}")
    count = 6 * nx * ny * nz
    body = data[_HEADER.size:]
    if len(body) != 8 * count:
        raise RawFormatError(f"expected {8 * count} data bytes, found {len(body)}")
    planes = np.frombuffer(body, dtype="<f8").astype(np.float64).reshape(6, nz, ny, nx)
    return FieldState(time, convention.from_em(planes[:3], planes[3:]), "evolved")


def write_raw(path, state: FieldState) -> None:
    with open(path, "wb") as fh:
        fh.write(encode(state))


def read_raw(path) -> FieldState:
    with open(path, "rb") as fh:
        return decode(fh.read())
