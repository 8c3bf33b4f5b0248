"""The in-memory volume type plus normalization and quantitative analysis.

Voxels are stored x-fastest in a (nz, ny, nx) C-order array. Byte-domain
volumes keep their absolute 0..255 scale through normalization (byte v maps
to v/255) so the embedded colour table stays meaningful; float-domain volumes
are min-max stretched. NaN voxels (blank voxels in survey data) are tracked
in a mask and excluded from every statistic.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from ..errors import ArgumentError, DataError
from ..model import Histogram

__all__ = ["ValueDomain", "Volume", "normalize", "histogram", "stat"]

GREY_TABLE = np.repeat(np.arange(256, dtype=np.uint8)[:, None], 3, axis=1)


class ValueDomain(str, Enum):
    RAW_BYTES = "raw_bytes"
    RAW_FLOAT = "raw_float"
    NORMALIZED = "normalized"


@dataclass
class Volume:
    """A 3D scalar grid with physical voxel sizes and a 256-entry colour
    table. ``data`` has shape (nz, ny, nx); ``nan_mask`` flags voxels that
    were NaN in the source and must carry zero weight downstream."""

    nx: int
    ny: int
    nz: int
    wx: float
    wy: float
    wz: float
    data: np.ndarray
    colour_table: np.ndarray = field(default_factory=lambda: GREY_TABLE.copy())
    value_domain: ValueDomain = ValueDomain.RAW_FLOAT
    nan_mask: np.ndarray | None = None

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1 or self.nz < 1:
            raise ArgumentError(
                f"voxel counts must be positive, got {self.nx}x{self.ny}x{self.nz}"
            )
        if self.wx <= 0 or self.wy <= 0 or self.wz <= 0:
            raise ArgumentError(
                f"voxel sizes must be positive, got {self.wx}, {self.wy}, {self.wz}"
            )
        expected = (self.nz, self.ny, self.nx)
        if self.data.shape != expected:
            raise ArgumentError(
                f"data shape {self.data.shape} does not match dims {expected}"
            )
        if self.colour_table.shape != (256, 3):
            raise ArgumentError("colour table must be 256x3")

    @property
    def voxel_count(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def voxel_diagonal(self) -> float:
        return float(np.sqrt(self.wx**2 + self.wy**2 + self.wz**2))

    @property
    def physical_extent(self) -> tuple[float, float, float]:
        return (self.nx * self.wx, self.ny * self.wy, self.nz * self.wz)

    def finite_values(self) -> np.ndarray:
        """Flat array of voxel values excluding NaN-origin voxels."""
        flat = self.data.reshape(-1)
        if self.nan_mask is None:
            return flat
        return flat[~self.nan_mask.reshape(-1)]

    @property
    def finite_count(self) -> int:
        if self.nan_mask is None:
            return self.voxel_count
        return self.voxel_count - int(np.count_nonzero(self.nan_mask))


def normalize(vol: Volume) -> Volume:
    """Map voxel values onto [0,1].

    Byte volumes scale by 1/255 (keeping the colour table aligned); float
    volumes are stretched so finite min maps to 0 and max to 1. Constant
    volumes map to all zeros; NaN voxels become 0 and stay flagged in the
    mask. Normalizing an already normalized volume is the identity.
    """
    if vol.value_domain is ValueDomain.NORMALIZED:
        return vol
    if vol.value_domain is ValueDomain.RAW_BYTES:
        data = vol.data.astype(np.float64) / 255.0
        return replace(vol, data=data, value_domain=ValueDomain.NORMALIZED)

    raw = vol.data.astype(np.float64)
    nan_mask = np.isnan(raw)
    if vol.nan_mask is not None:
        nan_mask |= vol.nan_mask
    finite = raw[~nan_mask]
    if finite.size == 0:
        raise DataError("volume has no finite voxels")
    lo = float(finite.min())
    hi = float(finite.max())
    if hi > lo:
        data = (raw - lo) / (hi - lo)
    else:
        data = np.zeros_like(raw)
    data[nan_mask] = 0.0
    mask = nan_mask if nan_mask.any() else None
    return replace(vol, data=data, value_domain=ValueDomain.NORMALIZED, nan_mask=mask)


def _require_normalized(vol: Volume, op: str) -> None:
    if vol.value_domain is not ValueDomain.NORMALIZED:
        raise ArgumentError(f"{op} requires a normalized volume")


def histogram(
    vol: Volume, bins: int, clip: tuple[float, float] | None = None
) -> Histogram:
    """Histogram of normalized voxel values over uniform bins spanning [0,1].

    Bins are right-closed: bin i covers (i/bins, (i+1)/bins], and the first
    bin additionally includes 0, so 1.0 always lands in the last bin. With a
    clip range only voxels inside [lo, hi] are counted. NaN-origin voxels
    never count.
    """
    _require_normalized(vol, "histogram")
    if bins < 1:
        raise ArgumentError(f"bins must be >= 1, got {bins}")
    values = vol.finite_values()
    if clip is not None:
        lo, hi = clip
        if not (0.0 <= lo <= hi <= 1.0):
            raise ArgumentError(f"clip range [{lo}, {hi}] invalid")
        values = values[(values >= lo) & (values <= hi)]
    idx = np.ceil(values * bins).astype(np.int64) - 1
    np.clip(idx, 0, bins - 1, out=idx)
    counts = np.bincount(idx, minlength=bins)
    edges = tuple(i / bins for i in range(bins + 1))
    return Histogram(bin_count=bins, edges=edges, counts=tuple(int(c) for c in counts))


def stat(vol: Volume, kind: str, level: float | None = None) -> float:
    """Scalar statistics over finite voxels: ``mean``, ``max``, or
    ``count_above`` (strictly greater than ``level``)."""
    _require_normalized(vol, "stat")
    values = vol.finite_values()
    if values.size == 0:
        raise DataError("volume has no finite voxels")
    if kind == "mean":
        return float(values.mean())
    if kind == "max":
        return float(values.max())
    if kind == "count_above":
        if level is None:
            raise ArgumentError("count_above needs a level")
        return float(np.count_nonzero(values > level))
    raise ArgumentError(f"unknown stat kind {kind!r}")


def parse_stat_kind(spec: str) -> tuple[str, float | None]:
    """Parse a stat spec such as ``mean`` or ``count_above:0.5``."""
    if spec in ("mean", "max"):
        return spec, None
    if spec.startswith("count_above:"):
        try:
            return "count_above", float(spec.split(":", 1)[1])
        except ValueError:
            raise ArgumentError(f"bad count_above level in {spec!r}") from None
    raise ArgumentError(f"unknown stat kind {spec!r}")
