"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import json
import urllib.error
import urllib.request
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cubewall.model import CameraState, GridConfig, RenderParams
from cubewall.volume import ValueDomain, Volume

settings.register_profile(
    "ci", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ci")


def make_volume(
    data: np.ndarray,
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0),
    domain: ValueDomain = ValueDomain.NORMALIZED,
    nan_mask: np.ndarray | None = None,
) -> Volume:
    nz, ny, nx = data.shape
    return Volume(
        nx=nx, ny=ny, nz=nz,
        wx=spacing[0], wy=spacing[1], wz=spacing[2],
        data=data, value_domain=domain, nan_mask=nan_mask,
    )


def sphere_volume(n: int, radius: float) -> Volume:
    """Field clamp(1 - r/radius, 0, 1) on an n^3 grid with unit voxels."""
    c = (n - 1) / 2.0
    z, y, x = np.mgrid[0:n, 0:n, 0:n].astype(np.float64)
    r = np.sqrt((x - c) ** 2 + (y - c) ** 2 + (z - c) ** 2)
    return make_volume(np.clip(1.0 - r / radius, 0.0, 1.0))


def http_json(url: str, body: dict | None = None, method: str | None = None):
    """Fire a JSON request and return (status, parsed body); HTTP errors come
    back as their status instead of raising."""
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(
        url, data=data, method=method or ("POST" if data else "GET"),
        headers={"Content-Type": "application/json"} if data else {},
    )
    try:
        with urllib.request.urlopen(req, timeout=30) as resp:
            return resp.status, json.loads(resp.read().decode())
    except urllib.error.HTTPError as exc:
        payload = exc.read().decode()
        try:
            return exc.code, json.loads(payload)
        except json.JSONDecodeError:
            return exc.code, {"raw": payload}


def http_bytes(url: str, etag: str | None = None):
    """GET raw bytes; returns (status, body, etag)."""
    req = urllib.request.Request(url)
    if etag:
        req.add_header("If-None-Match", etag)
    try:
        with urllib.request.urlopen(req, timeout=30) as resp:
            return resp.status, resp.read(), resp.headers.get("ETag")
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read(), exc.headers.get("ETag")


@pytest.fixture
def grid_20x4() -> GridConfig:
    return GridConfig(columns=20, rows=4)


@pytest.fixture
def default_camera() -> CameraState:
    return CameraState()


@pytest.fixture
def default_params() -> RenderParams:
    return RenderParams()


@pytest.fixture
def survey_dir(tmp_path: Path):
    """A tiny synthetic survey: four 16^3 cubes plus its catalog CSV."""
    from cubewall.synthetic import write_synthetic

    data = tmp_path / "data"
    lines = ["id,path,kind,dim,seed,mean"]
    for i, kind in enumerate(["sphere", "gaussian", "shells", "noise"]):
        lines.append(
            write_synthetic(kind, (16, 16, 16), data / f"c{i}.raw", seed=i,
                            cube_id=f"c{i}")
        )
    catalog_path = data / "catalog.csv"
    catalog_path.write_text("\n".join(lines) + "\n")
    return data
