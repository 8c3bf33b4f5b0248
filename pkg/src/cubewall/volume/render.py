"""Software ray caster: front-to-back compositing volume rendering and
single-isosurface ray marching over an orthographic camera.

Geometry conventions (documented because every oracle depends on them):

* The volume is an axis-aligned box centred on the origin with physical
  half-extents (nx*wx/2, ny*wy/2, nz*wz/2). Voxel centre (i, j, k) sits at
  ((i + 0.5 - nx/2)*wx, ...).
* At azimuth=elevation=roll=0 the camera looks along -z with +x right and
  +y up. Azimuth orbits about the world y axis, positive elevation raises
  the viewpoint above the equator, roll turns about the view axis.
* Trigonometry for angles that are exact multiples of 90 degrees is snapped
  to exact values, so axis-aligned views are bit-reproducible and mirror
  oracles hold exactly.
* The view window at zoom 1 spans the volume's full physical diagonal across
  the shorter viewport axis; zoom divides the window, pan shifts it by
  viewport fractions.
* Rays are sampled at midpoints: t_k = t_near + (k + 0.5)*step for
  k < floor((t_far - t_near)/step), step = sample_step * voxel diagonal.
* Per-sample opacity is opacity_scale * v inside [clip_lo, clip_hi] and 0
  outside; colour comes from the colour table at v. Compositing is
  front-to-back with early termination at accumulated alpha 0.99.
"""

from __future__ import annotations

import numpy as np

from ..errors import ArgumentError
from ..model import EARLY_TERMINATION_ALPHA, CameraState, RenderParams, RenderMode
from .colormaps import resolve_table
from .core import Volume
from .formats import quantize_bytes
from .image import FrameImage

__all__ = [
    "camera_basis",
    "raycast",
    "ray_isosurface",
    "render_volume_rgba",
    "render_isosurface_rgba",
]

ISO_AMBIENT = 0.15
_PARALLEL_EPS = 1e-12


def _sincos(deg: float) -> tuple[float, float]:
    """sin/cos in degrees, exact at multiples of 90."""
    a = float(deg) % 360.0
    if a % 90.0 == 0.0:
        quadrant = int(a // 90.0) % 4
        return [(0.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, 0.0)][quadrant]
    r = np.deg2rad(a)
    return float(np.sin(r)), float(np.cos(r))


def _rot_x(deg: float) -> np.ndarray:
    s, c = _sincos(deg)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _rot_y(deg: float) -> np.ndarray:
    s, c = _sincos(deg)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rot_z(deg: float) -> np.ndarray:
    s, c = _sincos(deg)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def camera_basis(cam: CameraState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """World-space (right, up, forward) unit vectors for a camera state."""
    m = _rot_y(cam.azimuth) @ _rot_x(-cam.elevation) @ _rot_z(cam.roll)
    right = m @ np.array([1.0, 0.0, 0.0])
    up = m @ np.array([0.0, 1.0, 0.0])
    forward = m @ np.array([0.0, 0.0, -1.0])
    return right, up, forward


def _build_rays(
    vol: Volume, cam: CameraState, params: RenderParams, viewport: tuple[int, int]
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, float]:
    """Per-pixel ray origins plus slab entry times and sample counts.

    Returns (origins (N,3), direction (3,), t_near (N,), nsteps (N,), step)
    with N = w*h in row-major pixel order (top row first).
    """
    w, h = viewport
    if w < 1 or h < 1:
        raise ArgumentError(f"viewport must be at least 1x1, got {w}x{h}")
    right, up, forward = camera_basis(cam)
    extent = vol.physical_extent
    half = np.sqrt(sum((e / 2.0) ** 2 for e in extent)) / cam.zoom
    scale = 2.0 * half / min(w, h)
    us = (np.arange(w) + 0.5 - w / 2.0) * scale + cam.pan[0] * w * scale
    vs = (h / 2.0 - np.arange(h) - 0.5) * scale + cam.pan[1] * h * scale
    uu, vv = np.meshgrid(us, vs)  # (h, w)
    origins = uu.reshape(-1, 1) * right + vv.reshape(-1, 1) * up
    n_rays = origins.shape[0]

    t_near = np.full(n_rays, -np.inf)
    t_far = np.full(n_rays, np.inf)
    for axis in range(3):
        e = extent[axis] / 2.0
        o = origins[:, axis]
        dk = forward[axis]
        if abs(dk) > _PARALLEL_EPS:
            ta = (-e - o) / dk
            tb = (e - o) / dk
            t_near = np.maximum(t_near, np.minimum(ta, tb))
            t_far = np.minimum(t_far, np.maximum(ta, tb))
        else:
            outside = (o < -e) | (o > e)
            t_far = np.where(outside, -np.inf, t_far)

    step = params.sample_step * vol.voxel_diagonal
    span = t_far - t_near
    nsteps = np.where(span > 0, np.floor(span / step), 0.0).astype(np.int64)
    nsteps = np.maximum(nsteps, 0)
    t_near = np.where(np.isfinite(t_near), t_near, 0.0)
    return origins, forward, t_near, nsteps, step


def _sample(vol: Volume, pos: np.ndarray, interpolation: str) -> np.ndarray:
    """Sample the scalar field at world positions (M,3); edge-clamped."""
    fx = pos[:, 0] / vol.wx + vol.nx / 2.0 - 0.5
    fy = pos[:, 1] / vol.wy + vol.ny / 2.0 - 0.5
    fz = pos[:, 2] / vol.wz + vol.nz / 2.0 - 0.5
    data = vol.data
    if interpolation == "nearest":
        ix = np.clip(np.floor(fx + 0.5).astype(np.int64), 0, vol.nx - 1)
        iy = np.clip(np.floor(fy + 0.5).astype(np.int64), 0, vol.ny - 1)
        iz = np.clip(np.floor(fz + 0.5).astype(np.int64), 0, vol.nz - 1)
        return data[iz, iy, ix].astype(np.float64)
    if interpolation != "trilinear":
        raise ArgumentError(f"unknown interpolation {interpolation!r}")

    def axis_split(f: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
        if n == 1:
            return np.zeros(len(f), dtype=np.int64), np.zeros(len(f))
        i0 = np.clip(np.floor(f).astype(np.int64), 0, n - 2)
        return i0, np.clip(f - i0, 0.0, 1.0)

    x0, tx = axis_split(fx, vol.nx)
    y0, ty = axis_split(fy, vol.ny)
    z0, tz = axis_split(fz, vol.nz)
    x1 = np.minimum(x0 + 1, vol.nx - 1)
    y1 = np.minimum(y0 + 1, vol.ny - 1)
    z1 = np.minimum(z0 + 1, vol.nz - 1)
    c00 = data[z0, y0, x0] * (1 - tx) + data[z0, y0, x1] * tx
    c01 = data[z0, y1, x0] * (1 - tx) + data[z0, y1, x1] * tx
    c10 = data[z1, y0, x0] * (1 - tx) + data[z1, y0, x1] * tx
    c11 = data[z1, y1, x0] * (1 - tx) + data[z1, y1, x1] * tx
    c0 = c00 * (1 - ty) + c01 * ty
    c1 = c10 * (1 - ty) + c11 * ty
    return c0 * (1 - tz) + c1 * tz


def render_volume_rgba(
    vol: Volume,
    cam: CameraState,
    params: RenderParams,
    viewport: tuple[int, int],
    interpolation: str = "trilinear",
) -> np.ndarray:
    """Float-precision volume render: (h, w, 4) RGBA in [0,1], straight
    alpha, transparent black background."""
    if params.mode is not RenderMode.VOLUME:
        raise ArgumentError("render_volume_rgba requires mode=volume")
    w, h = viewport
    origins, d, t_near, nsteps, step = _build_rays(vol, cam, params, viewport)
    n_rays = origins.shape[0]
    lut = resolve_table(params.colour_map, vol).astype(np.float64) / 255.0

    c_acc = np.zeros((n_rays, 3))
    a_acc = np.zeros(n_rays)
    k_max = int(nsteps.max()) if n_rays else 0
    for k in range(k_max):
        alive = (nsteps > k) & (a_acc < EARLY_TERMINATION_ALPHA)
        if not alive.any():
            break
        t = t_near[alive] + (k + 0.5) * step
        pos = origins[alive] + t[:, None] * d
        v = np.clip(_sample(vol, pos, interpolation), 0.0, 1.0)
        inside = (v >= params.clip_lo) & (v <= params.clip_hi)
        a = params.opacity_scale * v * inside
        idx = np.clip(np.floor(v * 255.0 + 0.5).astype(np.int64), 0, 255)
        contrib = (1.0 - a_acc[alive]) * a
        c_acc[alive] += contrib[:, None] * lut[idx]
        a_acc[alive] += contrib

    rgb = np.where(a_acc[:, None] > 0.0, c_acc / np.maximum(a_acc, 1e-300)[:, None], 0.0)
    rgba = np.concatenate([rgb, a_acc[:, None]], axis=1)
    return rgba.reshape(h, w, 4)


def raycast(
    vol: Volume,
    cam: CameraState,
    params: RenderParams,
    viewport: tuple[int, int],
    interpolation: str = "trilinear",
) -> FrameImage:
    """Volume-mode render quantized to an RGBA frame."""
    rgba = render_volume_rgba(vol, cam, params, viewport, interpolation)
    return FrameImage.from_array(quantize_bytes(rgba))


def render_isosurface_rgba(
    vol: Volume,
    cam: CameraState,
    params: RenderParams,
    viewport: tuple[int, int],
    interpolation: str = "trilinear",
) -> np.ndarray:
    """Float-precision isosurface render.

    The first iso_level crossing along each ray is located by the sign change
    between consecutive samples and refined by linear interpolation; shading
    is two-sided Lambert from the central-difference gradient with a fixed
    headlight. Missed rays stay transparent.
    """
    if params.mode is not RenderMode.ISOSURFACE:
        raise ArgumentError("render_isosurface_rgba requires mode=isosurface")
    w, h = viewport
    origins, d, t_near, nsteps, step = _build_rays(vol, cam, params, viewport)
    n_rays = origins.shape[0]
    iso = params.iso_level

    hit_t = np.full(n_rays, np.nan)
    prev_v = np.zeros(n_rays)
    undecided = nsteps > 0
    k_max = int(nsteps.max()) if n_rays else 0
    for k in range(k_max):
        active = undecided & (nsteps > k)
        if not active.any():
            break
        t = t_near[active] + (k + 0.5) * step
        pos = origins[active] + t[:, None] * d
        v = _sample(vol, pos, interpolation)
        if k == 0:
            # A first sample already at or above the level is a boundary hit.
            first_hit = v >= iso
            idx = np.flatnonzero(active)[first_hit]
            hit_t[idx] = t[first_hit]
            undecided[idx] = False
        else:
            prev = prev_v[active]
            crossing = ((prev < iso) != (v < iso)) | (v == iso)
            den = v - prev
            frac = np.where(den != 0.0, (iso - prev) / np.where(den == 0, 1, den), 1.0)
            idx = np.flatnonzero(active)[crossing]
            hit_t[idx] = (t - step)[crossing] + frac[crossing] * step
            undecided[idx] = False
        prev_v[active] = v

    out = np.zeros((n_rays, 4))
    hits = np.isfinite(hit_t)
    if hits.any():
        p = origins[hits] + hit_t[hits, None] * d
        grad = np.empty((int(hits.sum()), 3))
        for axis, spacing in enumerate((vol.wx, vol.wy, vol.wz)):
            offset = np.zeros(3)
            offset[axis] = spacing
            grad[:, axis] = (
                _sample(vol, p + offset, "trilinear")
                - _sample(vol, p - offset, "trilinear")
            ) / (2.0 * spacing)
        gnorm = np.linalg.norm(grad, axis=1)
        safe = np.where(gnorm > 0, gnorm, 1.0)
        lambert = np.abs(grad @ d) / safe
        lambert[gnorm == 0.0] = 0.0
        shade = ISO_AMBIENT + (1.0 - ISO_AMBIENT) * lambert
        lut = resolve_table(params.colour_map, vol).astype(np.float64) / 255.0
        base = lut[int(np.clip(np.floor(iso * 255.0 + 0.5), 0, 255))]
        out[hits, :3] = shade[:, None] * base
        out[hits, 3] = 1.0
    return out.reshape(h, w, 4)


def ray_isosurface(
    vol: Volume,
    cam: CameraState,
    params: RenderParams,
    viewport: tuple[int, int],
    interpolation: str = "trilinear",
) -> FrameImage:
    """Isosurface-mode render quantized to an RGBA frame."""
    rgba = render_isosurface_rgba(vol, cam, params, viewport, interpolation)
    return FrameImage.from_array(quantize_bytes(rgba))
