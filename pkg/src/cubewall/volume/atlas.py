"""Slice atlas: all z-slices of a volume tiled into one greyscale image so a
browser client can preview the cube without streaming frames."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image

from ..errors import ArgumentError
from .core import ValueDomain, Volume
from .formats import quantize_bytes

__all__ = ["AtlasImage", "build_atlas", "extract_slice", "encode_atlas_png"]


@dataclass(frozen=True)
class AtlasImage:
    """Greyscale tile sheet; slice k occupies tile
    (k mod tiles_x, k div tiles_x). ``image`` is (tiles_y*ny, tiles_x*nx)
    uint8, row 0 of a tile being the slice's y=0 row."""

    tiles_x: int
    tiles_y: int
    tile_w: int
    tile_h: int
    nz: int
    image: np.ndarray

    def __post_init__(self):
        if self.tiles_x * self.tiles_y < self.nz:
            raise ArgumentError(
                f"{self.tiles_x}x{self.tiles_y} tiles cannot hold {self.nz} slices"
            )
        expected = (self.tiles_y * self.tile_h, self.tiles_x * self.tile_w)
        if self.image.shape != expected:
            raise ArgumentError(
                f"atlas image shape {self.image.shape} does not match {expected}"
            )

    @property
    def descriptor(self) -> dict:
        return {
            "nx": self.tile_w,
            "ny": self.tile_h,
            "nz": self.nz,
            "tilesX": self.tiles_x,
        }


def build_atlas(vol: Volume) -> AtlasImage:
    """Tile quantized z-slices into an atlas; unused tiles stay zero."""
    if vol.value_domain is not ValueDomain.NORMALIZED:
        raise ArgumentError("build_atlas requires a normalized volume")
    nz = vol.nz
    tiles_x = math.ceil(math.sqrt(nz))
    tiles_y = math.ceil(nz / tiles_x)
    sheet = np.zeros((tiles_y * vol.ny, tiles_x * vol.nx), dtype=np.uint8)
    quantized = quantize_bytes(vol.data)
    for k in range(nz):
        col, row = k % tiles_x, k // tiles_x
        sheet[
            row * vol.ny : (row + 1) * vol.ny, col * vol.nx : (col + 1) * vol.nx
        ] = quantized[k]
    return AtlasImage(
        tiles_x=tiles_x,
        tiles_y=tiles_y,
        tile_w=vol.nx,
        tile_h=vol.ny,
        nz=nz,
        image=sheet,
    )


def extract_slice(atlas: AtlasImage, k: int) -> np.ndarray:
    """Inverse tile lookup: the quantized bytes of slice k."""
    if not 0 <= k < atlas.nz:
        raise ArgumentError(f"slice {k} outside 0..{atlas.nz - 1}")
    col, row = k % atlas.tiles_x, k // atlas.tiles_x
    return atlas.image[
        row * atlas.tile_h : (row + 1) * atlas.tile_h,
        col * atlas.tile_w : (col + 1) * atlas.tile_w,
    ]


def encode_atlas_png(atlas: AtlasImage) -> bytes:
    """Encode the tile sheet as an 8-bit greyscale PNG."""
    pil = Image.fromarray(atlas.image, mode="L")
    buf = io.BytesIO()
    pil.save(buf, format="PNG")
    return buf.getvalue()
