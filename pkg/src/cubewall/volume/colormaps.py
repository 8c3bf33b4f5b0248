"""Built-in colour maps, expanded from the control points shipped in
``colormaps.json`` to 256-entry RGB byte tables. The special name ``file``
selects the table embedded in the volume itself.
"""

from __future__ import annotations

import functools
import json
from importlib import resources

import numpy as np

from ..errors import ArgumentError
from .core import Volume
from .formats import quantize_bytes

__all__ = ["builtin_names", "resolve_table", "table_from_points"]


def table_from_points(points: list[tuple[float, list[int]]]) -> np.ndarray:
    """Linearly interpolate RGB control points into a 256x3 byte table."""
    stops = np.array([p[0] for p in points], dtype=np.float64)
    colours = np.array([p[1] for p in points], dtype=np.float64)
    x = np.arange(256, dtype=np.float64) / 255.0
    table = np.stack(
        [np.interp(x, stops, colours[:, ch]) for ch in range(3)], axis=1
    )
    return quantize_bytes(table / 255.0)


@functools.lru_cache(maxsize=1)
def _builtin_tables() -> dict[str, np.ndarray]:
    text = resources.files("cubewall").joinpath("colormaps.json").read_text("utf-8")
    raw = json.loads(text)
    return {name: table_from_points(points) for name, points in raw.items()}


def builtin_names() -> list[str]:
    return sorted(_builtin_tables())


def resolve_table(name: str, vol: Volume | None = None) -> np.ndarray:
    """Look up a colour table by name; ``file`` uses the volume's own."""
    if name == "file":
        if vol is None:
            raise ArgumentError("colour map 'file' needs a volume")
        return vol.colour_table
    tables = _builtin_tables()
    if name not in tables:
        raise ArgumentError(
            f"unknown colour map {name!r}; built-ins: {', '.join(builtin_names())}"
        )
    return tables[name]
