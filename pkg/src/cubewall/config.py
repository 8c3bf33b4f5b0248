"""Launch configuration: grid shape, node endpoints, data locations.

The JSON file looks like::

    {
      "grid": {"columns": 2, "rows": 4},
      "nodes": [
        {"column": 0, "host": "127.0.0.1", "control_port": 9301, "http_port": 9401},
        {"column": 1, "host": "127.0.0.1", "control_port": 9302, "http_port": 9402}
      ],
      "data_root": "data",
      "catalog": "data/catalog.csv",
      "viewport": {"width": 342, "height": 768},
      "manager_port": 9300
    }

Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .model import GridConfig

__all__ = ["NodeEndpoint", "SystemConfig", "load_config"]

DEFAULT_VIEWPORT = (342, 768)


@dataclass(frozen=True)
class NodeEndpoint:
    column: int
    host: str
    control_port: int
    http_port: int


@dataclass
class SystemConfig:
    grid: GridConfig
    nodes: list[NodeEndpoint]
    data_root: Path
    catalog_path: Path
    viewport: tuple[int, int] = DEFAULT_VIEWPORT
    manager_port: int = 0
    frontend_dir: Path | None = None

    def validate(self) -> None:
        columns = [n.column for n in self.nodes]
        if len(set(columns)) != len(columns):
            raise ConfigError("duplicate node columns in config")
        for c in columns:
            if not 0 <= c < self.grid.columns:
                raise ConfigError(
                    f"node column {c} outside grid of {self.grid.columns} columns"
                )

    def to_json_obj(self) -> dict:
        obj = {
            "grid": {"columns": self.grid.columns, "rows": self.grid.rows},
            "nodes": [
                {
                    "column": n.column,
                    "host": n.host,
                    "control_port": n.control_port,
                    "http_port": n.http_port,
                }
                for n in self.nodes
            ],
            "data_root": str(self.data_root),
            "catalog": str(self.catalog_path),
            "viewport": {"width": self.viewport[0], "height": self.viewport[1]},
            "manager_port": self.manager_port,
        }
        if self.frontend_dir is not None:
            obj["frontend_dir"] = str(self.frontend_dir)
        return obj


def parse_viewport(text: str) -> tuple[int, int]:
    """Parse WxH like ``342x768``."""
    try:
        w, h = text.lower().split("x")
        viewport = (int(w), int(h))
    except ValueError:
        raise ConfigError(f"viewport must look like 342x768, got {text!r}") from None
    if viewport[0] < 1 or viewport[1] < 1:
        raise ConfigError(f"viewport must be positive, got {text!r}")
    return viewport


def load_config(path: str | Path) -> SystemConfig:
    p = Path(path)
    try:
        obj = json.loads(p.read_text("utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"unparseable config {p}: {exc}") from exc
    base = p.parent

    def resolve(raw: str) -> Path:
        rp = Path(raw)
        return rp if rp.is_absolute() else base / rp

    try:
        grid = GridConfig(
            columns=int(obj["grid"]["columns"]), rows=int(obj["grid"]["rows"])
        )
        nodes = [
            NodeEndpoint(
                column=int(n["column"]),
                host=str(n.get("host", "127.0.0.1")),
                control_port=int(n["control_port"]),
                http_port=int(n["http_port"]),
            )
            for n in obj.get("nodes", [])
        ]
        vp = obj.get("viewport", {})
        viewport = (
            int(vp.get("width", DEFAULT_VIEWPORT[0])),
            int(vp.get("height", DEFAULT_VIEWPORT[1])),
        )
        config = SystemConfig(
            grid=grid,
            nodes=nodes,
            data_root=resolve(obj.get("data_root", ".")),
            catalog_path=resolve(obj["catalog"]),
            viewport=viewport,
            manager_port=int(obj.get("manager_port", 0)),
            frontend_dir=(
                resolve(obj["frontend_dir"]) if obj.get("frontend_dir") else None
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config {p}: {exc}") from exc
    config.validate()
    return config
