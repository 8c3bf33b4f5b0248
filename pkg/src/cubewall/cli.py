"""Command line entry points.

Subcommands: ``local`` (manager plus N node processes on loopback ports),
``manager`` and ``node`` (standalone services), ``batch`` (headless session
replay to PNGs), and ``gen`` (synthetic survey cubes). Exit codes: 0 ok,
2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import signal
import socket
import subprocess
import sys
import time
import urllib.error
import urllib.request
from pathlib import Path

from .catalog import ingest_catalog
from .config import NodeEndpoint, SystemConfig, load_config, parse_viewport
from .errors import ConfigError, CubewallError
from .manager.nodeclient import NodeClient
from .manager.service import ManagerCore, ManagerService
from .manager.session import load_session, replay
from .manager.state import state_hash
from .model import GridConfig
from .node import NodeService, compose_panel_frame
from .synthetic import KINDS, write_synthetic
from .volume import encode_png, normalize, read_volume_file

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def wait_http_ok(url: str, timeout: float = 15.0) -> None:
    deadline = time.monotonic() + timeout
    last: Exception | None = None
    while time.monotonic() < deadline:
        try:
            with urllib.request.urlopen(url, timeout=2):
                return
        except (urllib.error.URLError, OSError) as exc:
            last = exc
            time.sleep(0.1)
    raise ConfigError(f"service at {url} never came up: {last}")


def _parse_dims(text: str) -> tuple[int, int, int]:
    parts = text.lower().replace("x", ",").split(",")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise ConfigError(f"dims must be N or NX,NY,NZ, got {text!r}") from None
    if len(values) == 1:
        values = values * 3
    if len(values) != 3 or min(values) < 1:
        raise ConfigError(f"dims must be N or NX,NY,NZ with positive values, got {text!r}")
    return values[0], values[1], values[2]


def _load_catalog_file(path: Path):
    try:
        return ingest_catalog(path.read_text("utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"catalog file not found: {path}") from None


def _build_manager(config: SystemConfig, session: Path | None) -> ManagerCore:
    catalog = _load_catalog_file(config.catalog_path)
    clients: dict[int, NodeClient] = {}
    for ep in config.nodes:
        client = NodeClient(ep.column, ep.host, ep.control_port, ep.http_port)
        client.connect()
        clients[ep.column] = client
    return ManagerCore(config.grid, catalog, clients, session_sink=session)


# -- subcommands -----------------------------------------------------------------


def cmd_gen(args) -> int:
    dims = _parse_dims(args.dims)
    fragment = write_synthetic(args.kind, dims, args.out, seed=args.seed,
                               cube_id=args.id)
    print(fragment)
    return EXIT_OK


def cmd_node(args) -> int:
    service = NodeService(
        column=args.column,
        rows=args.rows,
        control_port=args.control_port,
        http_port=args.http_port,
        data_root=args.data_root,
        viewport=parse_viewport(args.viewport),
    )
    print(
        f"node column {args.column}: control :{service.control_port} "
        f"http :{service.http_port}",
        flush=True,
    )
    service.serve_forever()
    return EXIT_OK


def cmd_manager(args) -> int:
    config = load_config(args.config)
    core = _build_manager(config, args.session)
    static = config.frontend_dir if config.frontend_dir and config.frontend_dir.is_dir() else None
    service = ManagerService(core, port=config.manager_port, static_dir=static)
    service.start()
    print(f"manager http on http://127.0.0.1:{service.port}", flush=True)
    if static:
        print(f"controller at http://127.0.0.1:{service.port}/ui/", flush=True)
    try:
        signal.pause()
    except (KeyboardInterrupt, AttributeError):
        pass
    finally:
        service.stop()
    return EXIT_OK


def _spawn_node(column: int, rows: int, control_port: int, http_port: int,
                data_root: Path, viewport: str) -> subprocess.Popen:
    cmd = [
        sys.executable, "-m", "cubewall.cli", "node",
        "--column", str(column), "--rows", str(rows),
        "--control-port", str(control_port), "--http-port", str(http_port),
        "--data-root", str(data_root), "--viewport", viewport,
    ]
    return subprocess.Popen(cmd, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)


def cmd_local(args) -> int:
    if args.config:
        config = load_config(args.config)
    else:
        if not args.catalog:
            raise ConfigError("local mode needs --config or --catalog")
        grid = GridConfig(columns=args.columns, rows=args.rows)
        config = SystemConfig(
            grid=grid,
            nodes=[],
            data_root=Path(args.data_root),
            catalog_path=Path(args.catalog),
            viewport=parse_viewport(args.viewport),
            manager_port=args.http_port,
            frontend_dir=Path(args.frontend) if args.frontend else None,
        )
    _load_catalog_file(config.catalog_path)  # fail before spawning anything

    procs: list[subprocess.Popen] = []
    endpoints: list[NodeEndpoint] = []
    viewport_text = f"{config.viewport[0]}x{config.viewport[1]}"
    try:
        for column in range(config.grid.columns):
            control_port, http_port = free_port(), free_port()
            procs.append(
                _spawn_node(column, config.grid.rows, control_port, http_port,
                            config.data_root, viewport_text)
            )
            endpoints.append(NodeEndpoint(column, "127.0.0.1", control_port, http_port))
        for ep in endpoints:
            wait_http_ok(f"http://{ep.host}:{ep.http_port}/healthz")
        config.nodes = endpoints
        core = _build_manager(config, args.session)
        static = (
            config.frontend_dir
            if config.frontend_dir and config.frontend_dir.is_dir()
            else None
        )
        service = ManagerService(core, port=config.manager_port, static_dir=static)
        service.start()
        url = f"http://127.0.0.1:{service.port}"
        print(f"manager http on {url}", flush=True)
        print(f"controller at {url}/ui/" if static else f"API at {url}/state",
              flush=True)
        print(f"{config.grid.columns} node(s) x {config.grid.rows} panels = "
              f"{config.grid.slot_count} slots", flush=True)
        try:
            while all(p.poll() is None for p in procs):
                time.sleep(0.5)
            raise ConfigError("a node process exited unexpectedly")
        except KeyboardInterrupt:
            pass
        finally:
            service.stop()
        return EXIT_OK
    finally:
        for p in procs:
            if p.poll() is None:
                p.terminate()
        for p in procs:
            try:
                p.wait(timeout=5)
            except subprocess.TimeoutExpired:
                p.kill()


def cmd_batch(args) -> int:
    config = load_config(args.config)
    blob = Path(args.session).read_bytes()
    log, grid = load_session(blob)
    if (grid.columns, grid.rows) != (config.grid.columns, config.grid.rows):
        raise ConfigError(
            f"session grid {grid.columns}x{grid.rows} does not match config "
            f"{config.grid.columns}x{config.grid.rows}"
        )
    final = replay(log, grid, upto=args.upto)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    volumes = {}
    for cube_id, prov in final.provenance.items():
        path = Path(prov["path"])
        if not path.is_absolute():
            path = config.data_root / path
        volumes[cube_id] = normalize(read_volume_file(path))

    manifest = {}
    for slot in grid.all_slots():
        cube_id = final.grid_state.occupancy[slot]
        frame = compose_panel_frame(
            volumes.get(cube_id),
            cube_id,
            slot.label(),
            final.grid_state.camera,
            final.grid_state.params,
            config.viewport,
        )
        png = encode_png(frame)
        (out_dir / f"{slot.label()}.png").write_bytes(png)
        manifest[slot.label()] = hashlib.sha256(png).hexdigest()

    final_hash = state_hash(final)
    (out_dir / "state_hash.txt").write_text(final_hash + "\n")
    (out_dir / "frames.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"replayed {final.seq} events -> {len(manifest)} frames in {out_dir}")
    print(f"state_hash {final_hash}")
    return EXIT_OK


# -- argument parsing --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubewall",
        description="Comparative visualisation of data-cube surveys on a "
        "simulated display wall.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("local", help="run manager + N nodes on this machine")
    p.add_argument("--config", type=Path, help="JSON config file")
    p.add_argument("--columns", type=int, default=1, help="node columns (default 1)")
    p.add_argument("--rows", type=int, default=4, help="panels per column (default 4)")
    p.add_argument("--catalog", type=Path, help="survey CSV")
    p.add_argument("--data-root", type=Path, default=Path("."))
    p.add_argument("--viewport", default="342x768", help="panel size WxH")
    p.add_argument("--http-port", type=int, default=0, help="manager port (0 = any)")
    p.add_argument("--session", type=Path, help="session log sink (JSON lines)")
    p.add_argument("--frontend", type=Path, help="built web controller directory")
    p.set_defaults(func=cmd_local)

    p = sub.add_parser("manager", help="run the manager against live nodes")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--session", type=Path, help="session log sink (JSON lines)")
    p.set_defaults(func=cmd_manager)

    p = sub.add_parser("node", help="run one render node")
    p.add_argument("--column", type=int, required=True)
    p.add_argument("--rows", type=int, default=4)
    p.add_argument("--control-port", type=int, default=0)
    p.add_argument("--http-port", type=int, default=0)
    p.add_argument("--data-root", type=Path, default=Path("."))
    p.add_argument("--viewport", default="342x768")
    p.set_defaults(func=cmd_node)

    p = sub.add_parser("batch", help="replay a session headlessly to PNG frames")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--session", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--upto", default=None,
                   help="stop at this seq or checkpoint name")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("gen", help="generate a synthetic survey cube")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--dims", default="64", help="N or NX,NY,NZ (max 512)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--id", help="cube ID for the catalog fragment")
    p.add_argument("--out", type=Path, required=True, help=".xrw or .raw path")
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(asctime)s %(name)s %(levelname)s %(message)s"
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc.message}", file=sys.stderr)
        return EXIT_CONFIG
    except CubewallError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
