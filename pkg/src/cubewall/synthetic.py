"""Deterministic synthetic data cubes so the repo is self-contained: sphere
and shell fields with known analytic silhouettes, a seeded Gaussian blob,
and seeded noise. Real XRW/raw files load through the same pipeline."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ArgumentError
from .volume import ValueDomain, Volume, quantize_bytes, write_rawfloat, write_xrw

__all__ = ["KINDS", "sphere_radius", "make_field", "make_volume", "write_synthetic"]

KINDS = ("sphere", "gaussian", "shells", "noise")
MAX_DIM = 512


def sphere_radius(dims: tuple[int, int, int]) -> float:
    """Outer radius of the generated sphere field, in voxel units: the field
    is clamp(1 - r/R, 0, 1), so the iso_level=0.5 surface sits at R/2."""
    return 0.8 * min(dims) / 2.0


def _radius_grid(dims: tuple[int, int, int], center: np.ndarray) -> np.ndarray:
    nx, ny, nz = dims
    z, y, x = np.mgrid[0:nz, 0:ny, 0:nx].astype(np.float64)
    return np.sqrt(
        (x - center[0]) ** 2 + (y - center[1]) ** 2 + (z - center[2]) ** 2
    )


def make_field(kind: str, dims: tuple[int, int, int], seed: int = 0) -> np.ndarray:
    """A (nz, ny, nx) scalar field in [0,1]."""
    nx, ny, nz = dims
    if min(dims) < 1:
        raise ArgumentError(f"dims must be positive, got {dims}")
    if max(dims) > MAX_DIM:
        raise ArgumentError(f"dims capped at {MAX_DIM}^3, got {dims}")
    center = np.array([(nx - 1) / 2.0, (ny - 1) / 2.0, (nz - 1) / 2.0])
    rng = np.random.default_rng(seed)
    if kind == "sphere":
        r = _radius_grid(dims, center)
        return np.clip(1.0 - r / sphere_radius(dims), 0.0, 1.0)
    if kind == "gaussian":
        jitter = rng.uniform(-0.08, 0.08, size=3) * np.array([nx, ny, nz])
        r = _radius_grid(dims, center + jitter)
        sigma = 0.22 * min(dims)
        return np.exp(-(r**2) / (2.0 * sigma**2))
    if kind == "shells":
        r = _radius_grid(dims, center)
        outer = 0.9 * min(dims) / 2.0
        wavelength = outer / 3.0
        envelope = np.clip(1.0 - r / outer, 0.0, 1.0)
        return 0.5 * (1.0 + np.cos(2.0 * np.pi * r / wavelength)) * envelope
    if kind == "noise":
        return rng.random((nz, ny, nx))
    raise ArgumentError(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}")


def make_volume(
    kind: str, dims: tuple[int, int, int], seed: int = 0, as_bytes: bool = False
) -> Volume:
    field = make_field(kind, dims, seed)
    nx, ny, nz = dims
    if as_bytes:
        return Volume(
            nx=nx, ny=ny, nz=nz, wx=1.0, wy=1.0, wz=1.0,
            data=quantize_bytes(field), value_domain=ValueDomain.RAW_BYTES,
        )
    return Volume(
        nx=nx, ny=ny, nz=nz, wx=1.0, wy=1.0, wz=1.0,
        data=field, value_domain=ValueDomain.RAW_FLOAT,
    )


def write_synthetic(
    kind: str,
    dims: tuple[int, int, int],
    out_path: str | Path,
    seed: int = 0,
    cube_id: str | None = None,
) -> str:
    """Write an .xrw or .raw file (chosen by extension) and return a catalog
    row fragment ``id,path,kind,dim,seed,mean``."""
    path = Path(out_path)
    if path.suffix.lower() == ".xrw":
        vol = make_volume(kind, dims, seed, as_bytes=True)
        blob = write_xrw(vol)
    elif path.suffix.lower() == ".raw":
        vol = make_volume(kind, dims, seed, as_bytes=False)
        blob = write_rawfloat(vol)
    else:
        raise ArgumentError(f"choose .xrw or .raw output, got {path.suffix!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(blob)
    mean = float(vol.data.mean()) / (255.0 if path.suffix.lower() == ".xrw" else 1.0)
    cid = cube_id or path.stem
    return f"{cid},{path.name},{kind},{min(dims)},{seed},{mean:.6f}"
