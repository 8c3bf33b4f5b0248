"""Volume file formats.

XRW: a gzip-compressed stream of little-endian int32 nx, ny, nz; float32
wx, wy, wz; nx*ny*nz unsigned data bytes (x-fastest); and a 256-entry RGB
colour table (768 bytes). Writing is canonical (gzip level 9, zero mtime) so
write(read(write(v))) is bit-exact.

Raw-float: the same header uncompressed, followed by nx*ny*nz little-endian
float32 values; NaN marks blank voxels.
"""

from __future__ import annotations

import gzip
import struct
import zlib
from pathlib import Path

import numpy as np

from ..errors import ArgumentError, FormatError
from .core import ValueDomain, Volume

__all__ = [
    "read_xrw",
    "write_xrw",
    "read_rawfloat",
    "write_rawfloat",
    "read_volume_file",
    "quantize_bytes",
]

_HEADER = struct.Struct("<3i3f")
_TABLE_BYTES = 256 * 3
_MAX_DIM = 2**31 - 1


def quantize_bytes(values: np.ndarray) -> np.ndarray:
    """Quantize [0,1] floats to bytes, rounding half away from zero."""
    return np.clip(np.floor(values * 255.0 + 0.5), 0, 255).astype(np.uint8)


def _parse_header(buf: bytes, what: str) -> tuple[int, int, int, float, float, float]:
    if len(buf) < _HEADER.size:
        raise FormatError(f"truncated {what} header", offset=len(buf))
    nx, ny, nz, wx, wy, wz = _HEADER.unpack_from(buf, 0)
    if nx <= 0 or ny <= 0 or nz <= 0:
        raise FormatError(f"non-positive dimensions {nx}x{ny}x{nz}", offset=0)
    if not (wx > 0 and wy > 0 and wz > 0):
        raise FormatError(f"non-positive voxel sizes {wx}, {wy}, {wz}", offset=12)
    return nx, ny, nz, wx, wy, wz


def read_xrw(data: bytes) -> Volume:
    """Decode an XRW stream into a byte-domain Volume."""
    try:
        raw = gzip.decompress(data)
    except (OSError, EOFError, zlib.error) as exc:
        raise FormatError(f"gzip decompression failed: {exc}", offset=0) from exc
    nx, ny, nz, wx, wy, wz = _parse_header(raw, "XRW")
    n = nx * ny * nz
    expected = _HEADER.size + n + _TABLE_BYTES
    if len(raw) < expected:
        raise FormatError(
            f"truncated XRW stream: need {expected} bytes, have {len(raw)}",
            offset=len(raw),
        )
    if len(raw) > expected:
        raise FormatError(
            f"trailing bytes in XRW stream: expected {expected}, have {len(raw)}",
            offset=expected,
        )
    voxels = np.frombuffer(raw, dtype=np.uint8, count=n, offset=_HEADER.size)
    table = np.frombuffer(
        raw, dtype=np.uint8, count=_TABLE_BYTES, offset=_HEADER.size + n
    )
    return Volume(
        nx=nx,
        ny=ny,
        nz=nz,
        wx=wx,
        wy=wy,
        wz=wz,
        data=voxels.reshape(nz, ny, nx).copy(),
        colour_table=table.reshape(256, 3).copy(),
        value_domain=ValueDomain.RAW_BYTES,
    )


def write_xrw(vol: Volume) -> bytes:
    """Encode a Volume as canonical XRW bytes.

    Byte-domain data is written verbatim; normalized data is quantized with
    round-half-away-from-zero. Float-domain volumes must be normalized first.
    """
    if vol.value_domain is ValueDomain.RAW_BYTES:
        voxels = np.ascontiguousarray(vol.data, dtype=np.uint8)
    elif vol.value_domain is ValueDomain.NORMALIZED:
        voxels = quantize_bytes(vol.data)
    else:
        raise ArgumentError("normalize raw float volumes before writing XRW")
    for dim in (vol.nx, vol.ny, vol.nz):
        if dim > _MAX_DIM:
            raise FormatError(f"dimension {dim} exceeds int32")
    payload = (
        _HEADER.pack(vol.nx, vol.ny, vol.nz, vol.wx, vol.wy, vol.wz)
        + voxels.tobytes()
        + np.ascontiguousarray(vol.colour_table, dtype=np.uint8).tobytes()
    )
    return gzip.compress(payload, compresslevel=9, mtime=0)


def read_rawfloat(data: bytes) -> Volume:
    """Decode an uncompressed float32 volume; NaNs become flagged voxels."""
    nx, ny, nz, wx, wy, wz = _parse_header(data, "raw-float")
    n = nx * ny * nz
    expected = _HEADER.size + 4 * n
    if len(data) < expected:
        raise FormatError(
            f"truncated raw-float stream: need {expected} bytes, have {len(data)}",
            offset=len(data),
        )
    if len(data) > expected:
        raise FormatError(
            f"trailing bytes in raw-float stream: expected {expected}, "
            f"have {len(data)}",
            offset=expected,
        )
    values = np.frombuffer(data, dtype="<f4", count=n, offset=_HEADER.size)
    values = values.reshape(nz, ny, nx).astype(np.float64)
    nan_mask = np.isnan(values)
    return Volume(
        nx=nx,
        ny=ny,
        nz=nz,
        wx=wx,
        wy=wy,
        wz=wz,
        data=values,
        value_domain=ValueDomain.RAW_FLOAT,
        nan_mask=nan_mask if nan_mask.any() else None,
    )


def write_rawfloat(vol: Volume) -> bytes:
    """Inverse of :func:`read_rawfloat` for float-domain volumes."""
    if vol.value_domain is ValueDomain.RAW_BYTES:
        raise ArgumentError("byte volumes belong in XRW, not raw-float")
    data = vol.data.astype(np.float64).copy()
    if vol.nan_mask is not None:
        data[vol.nan_mask] = np.nan
    return (
        _HEADER.pack(vol.nx, vol.ny, vol.nz, vol.wx, vol.wy, vol.wz)
        + np.ascontiguousarray(data, dtype="<f4").tobytes()
    )


def read_volume_file(path: str | Path) -> Volume:
    """Load a volume file, inferring the format from the extension
    (.xrw gzip byte volumes, .raw float volumes)."""
    p = Path(path)
    blob = p.read_bytes()
    suffix = p.suffix.lower()
    if suffix == ".xrw":
        return read_xrw(blob)
    if suffix == ".raw":
        return read_rawfloat(blob)
    raise FormatError(f"unknown volume extension {suffix!r} for {p.name}")
