"""Volume engine: file formats, normalization, analysis, rendering, and the
slice atlas for browser previews."""

from .atlas import AtlasImage, build_atlas, encode_atlas_png, extract_slice
from .colormaps import builtin_names, resolve_table
from .core import ValueDomain, Volume, histogram, normalize, parse_stat_kind, stat
from .formats import (
    quantize_bytes,
    read_rawfloat,
    read_volume_file,
    read_xrw,
    write_rawfloat,
    write_xrw,
)
from .image import FrameImage, encode_png, placeholder_frame, stamp_label
from .render import (
    camera_basis,
    ray_isosurface,
    raycast,
    render_isosurface_rgba,
    render_volume_rgba,
)

__all__ = [
    "AtlasImage",
    "FrameImage",
    "ValueDomain",
    "Volume",
    "build_atlas",
    "builtin_names",
    "camera_basis",
    "encode_atlas_png",
    "encode_png",
    "extract_slice",
    "histogram",
    "normalize",
    "parse_stat_kind",
    "placeholder_frame",
    "quantize_bytes",
    "ray_isosurface",
    "raycast",
    "read_rawfloat",
    "read_volume_file",
    "read_xrw",
    "render_isosurface_rgba",
    "render_volume_rgba",
    "resolve_table",
    "stamp_label",
    "stat",
    "write_rawfloat",
    "write_xrw",
]
