"""Render node: the worker owning one grid column.

Holds up to ``rows`` volumes (one per panel), executes wire commands through
the volume engine, and serves rendered frames over HTTP. Commands execute one
at a time; camera/parameter changes re-render every occupied panel and swap
all frames atomically so HTTP readers never see a mixed state.
"""

from __future__ import annotations

import hashlib
import json
import logging
import socketserver
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import (
    ArgumentError,
    CubewallError,
    FramingError,
    NoDataError,
    ProtocolMismatchError,
)
from .model import CameraState, Histogram, RenderMode, RenderParams
from .volume import (
    FrameImage,
    Volume,
    build_atlas,
    encode_atlas_png,
    encode_png,
    histogram,
    normalize,
    placeholder_frame,
    ray_isosurface,
    raycast,
    read_volume_file,
    stamp_label,
    stat,
)
from .wire import IdValidator, Kind, WireMessage, decode, encode

logger = logging.getLogger(__name__)

DEFAULT_VIEWPORT = (342, 768)
DEFAULT_HISTOGRAM_BINS = 256


def panel_slot_label(column: int, panel: int) -> str:
    from .model import column_letters

    return f"{column_letters(column)}{panel}"


def compose_panel_frame(
    volume: Volume | None,
    cube_id: str | None,
    slot_label: str,
    camera: CameraState,
    params: RenderParams,
    viewport: tuple[int, int],
) -> FrameImage:
    """The full panel image: render (or placeholder) plus the ID/address
    label stamped in the margin. Shared by the live node and headless batch
    replay so both produce byte-identical frames."""
    if volume is None or cube_id is None:
        return placeholder_frame(viewport[0], viewport[1], slot_label)
    if params.mode is RenderMode.ISOSURFACE:
        frame = ray_isosurface(volume, camera, params, viewport)
    else:
        frame = raycast(volume, camera, params, viewport)
    return stamp_label(frame, f"{slot_label} {cube_id}")


@dataclass
class PanelSlot:
    """One display panel of the node's column."""

    panel: int
    cube_id: str | None = None
    volume: Volume | None = None
    histogram_cache: Histogram | None = None
    frame: FrameImage | None = None
    png: bytes | None = None
    etag: str | None = None
    atlas_png: bytes | None = None
    atlas_descriptor: dict | None = None


@dataclass
class _FrameUpdate:
    panel: int
    frame: FrameImage


class NodeCore:
    """The node state machine, independent of any socket plumbing."""

    def __init__(
        self,
        column: int,
        rows: int,
        data_root: str | Path = ".",
        viewport: tuple[int, int] = DEFAULT_VIEWPORT,
    ):
        self.column = column
        self.rows = rows
        self.data_root = Path(data_root)
        self.viewport = viewport
        self.camera = CameraState()
        self.params = RenderParams()
        self.panels: dict[int, PanelSlot] = {p: PanelSlot(panel=p) for p in range(1, rows + 1)}
        self._command_lock = threading.Lock()
        self._frame_lock = threading.Lock()
        for p in range(1, rows + 1):
            self._swap_frames([_FrameUpdate(p, self._render_panel(self.panels[p]))])

    # -- frame management ---------------------------------------------------

    def _render_panel(self, slot: PanelSlot) -> FrameImage:
        return compose_panel_frame(
            slot.volume,
            slot.cube_id,
            panel_slot_label(self.column, slot.panel),
            self.camera,
            self.params,
            self.viewport,
        )

    def _swap_frames(self, updates: list[_FrameUpdate]) -> None:
        """Atomically publish new frames; readers see all or none."""
        encoded = []
        for upd in updates:
            png = encode_png(upd.frame)
            encoded.append((upd.panel, upd.frame, png, hashlib.sha256(png).hexdigest()))
        with self._frame_lock:
            for panel, frame, png, etag in encoded:
                slot = self.panels[panel]
                slot.frame, slot.png, slot.etag = frame, png, etag

    def frame_png(self, panel: int) -> tuple[bytes, str]:
        self._check_panel(panel)
        with self._frame_lock:
            slot = self.panels[panel]
            return slot.png, slot.etag

    def atlas_png(self, panel: int) -> tuple[bytes, dict]:
        self._check_panel(panel)
        with self._frame_lock:
            slot = self.panels[panel]
            if slot.atlas_png is None:
                raise ArgumentError(f"panel {panel} has no atlas (no cube loaded)")
            return slot.atlas_png, slot.atlas_descriptor

    def _check_panel(self, panel: int | None) -> PanelSlot:
        if panel is None or panel not in self.panels:
            raise ArgumentError(
                f"panel must be 1..{self.rows}, got {panel}"
            )
        return self.panels[panel]

    # -- command handlers ---------------------------------------------------

    def handle_load(self, panel: int, cube_id: str, path: str) -> dict:
        slot = self._check_panel(panel)
        t0 = time.monotonic()
        file_path = Path(path)
        if not file_path.is_absolute():
            file_path = self.data_root / file_path
        vol = normalize(read_volume_file(file_path))
        cache = histogram(vol, DEFAULT_HISTOGRAM_BINS)
        slot.cube_id = cube_id
        slot.volume = vol
        slot.histogram_cache = cache
        atlas = build_atlas(vol)
        slot.atlas_png = encode_atlas_png(atlas)
        slot.atlas_descriptor = atlas.descriptor
        self._swap_frames([_FrameUpdate(panel, self._render_panel(slot))])
        return {
            "load_ms": round((time.monotonic() - t0) * 1000.0, 3),
            "voxel_count": vol.voxel_count,
        }

    def handle_unload(self, panel: int) -> dict:
        slot = self._check_panel(panel)
        slot.cube_id = None
        slot.volume = None
        slot.histogram_cache = None
        slot.atlas_png = None
        slot.atlas_descriptor = None
        self._swap_frames([_FrameUpdate(panel, self._render_panel(slot))])
        return {}

    def _rerender_all(self) -> None:
        updates = [
            _FrameUpdate(p, self._render_panel(slot)) for p, slot in self.panels.items()
        ]
        self._swap_frames(updates)

    def handle_set_camera(self, payload: dict) -> dict:
        self.camera = CameraState.from_payload(payload)
        self._rerender_all()
        return {}

    def handle_set_params(self, payload: dict) -> dict:
        self.params = RenderParams.from_payload(payload)
        self._rerender_all()
        return {}

    def handle_set_clip(self, payload: dict) -> dict:
        self.params = self.params.with_clip(payload["clip_lo"], payload["clip_hi"])
        self._rerender_all()
        return {}

    def handle_query_histogram(self, panel: int, payload: dict) -> dict:
        slot = self._check_panel(panel)
        if slot.volume is None:
            raise NoDataError(f"panel {panel} has no data")
        bins = int(payload.get("bins", DEFAULT_HISTOGRAM_BINS))
        clip = None
        if payload.get("lo") is not None or payload.get("hi") is not None:
            clip = (float(payload.get("lo", 0.0)), float(payload.get("hi", 1.0)))
        if bins == DEFAULT_HISTOGRAM_BINS and clip is None and slot.histogram_cache:
            return slot.histogram_cache.to_payload()
        return histogram(slot.volume, bins, clip).to_payload()

    def handle_query_stat(self, panel: int, payload: dict) -> dict:
        slot = self._check_panel(panel)
        if slot.volume is None:
            raise NoDataError(f"panel {panel} has no data")
        value = stat(slot.volume, payload["kind"], payload.get("level"))
        return {"value": value}

    def handle_render_frame(self, panel: int) -> dict:
        slot = self._check_panel(panel)
        self._swap_frames([_FrameUpdate(panel, self._render_panel(slot))])
        return {"etag": slot.etag}

    def handle_build_atlas(self, panel: int) -> dict:
        slot = self._check_panel(panel)
        if slot.volume is None:
            raise NoDataError(f"panel {panel} has no data")
        atlas = build_atlas(slot.volume)
        with self._frame_lock:
            slot.atlas_png = encode_atlas_png(atlas)
            slot.atlas_descriptor = atlas.descriptor
        return {"descriptor": atlas.descriptor}

    # -- wire dispatch ------------------------------------------------------

    def execute(self, msg: WireMessage) -> WireMessage:
        """Run one command serially and build its response."""
        with self._command_lock:
            try:
                result = self._dispatch(msg)
                return WireMessage(id=msg.id, kind=Kind.ACK, payload=result)
            except CubewallError as exc:
                if msg.kind is Kind.LOAD:
                    code = "load-failed"
                elif msg.kind in (Kind.SET_CAMERA, Kind.SET_PARAMS, Kind.SET_CLIP):
                    code = "bad-params"
                else:
                    code = exc.code
                return WireMessage.error(msg.id, code, exc.message)
            except FileNotFoundError as exc:
                return WireMessage.error(msg.id, "load-failed", str(exc))

    def _dispatch(self, msg: WireMessage) -> dict:
        kind = msg.kind
        if kind is Kind.LOAD:
            return self.handle_load(msg.panel, msg.payload["id"], msg.payload["path"])
        if kind is Kind.UNLOAD:
            return self.handle_unload(msg.panel)
        if kind is Kind.SET_CAMERA:
            return self.handle_set_camera(msg.payload)
        if kind is Kind.SET_PARAMS:
            return self.handle_set_params(msg.payload)
        if kind is Kind.SET_CLIP:
            return self.handle_set_clip(msg.payload)
        if kind is Kind.QUERY_HISTOGRAM:
            return self.handle_query_histogram(msg.panel, msg.payload)
        if kind is Kind.QUERY_STAT:
            return self.handle_query_stat(msg.panel, msg.payload)
        if kind is Kind.RENDER_FRAME:
            return self.handle_render_frame(msg.panel)
        if kind is Kind.BUILD_ATLAS:
            return self.handle_build_atlas(msg.panel)
        raise ArgumentError(f"kind {kind.value} is not a node command")


class _ControlHandler(socketserver.StreamRequestHandler):
    """One manager connection: greet with Hello, then serve requests
    line-by-line until the peer goes away or framing breaks."""

    def handle(self):
        core: NodeCore = self.server.core
        hello = WireMessage(
            id=0,
            kind=Kind.HELLO,
            payload={
                "column": core.column,
                "rows": core.rows,
                "http_port": self.server.http_port,
            },
        )
        self.wfile.write(encode(hello))
        validator = IdValidator()
        while True:
            line = self.rfile.readline()
            if not line:
                return
            try:
                msg = decode(line)
                validator.check(msg)
            except ProtocolMismatchError as exc:
                reply = WireMessage.error(exc.msg_id or 0, exc.code, exc.message)
                self.wfile.write(encode(reply))
                continue
            except FramingError as exc:
                logger.warning("resetting control connection: %s", exc.message)
                return
            self.wfile.write(encode(core.execute(msg)))
            self.wfile.flush()


class _ControlServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class _NodeHTTPHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # quiet by default
        logger.debug("http: " + fmt, *args)

    def _send(self, status: int, body: bytes, content_type: str,
              extra: dict | None = None):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        for k, v in (extra or {}).items():
            self.send_header(k, v)
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, obj) -> None:
        self._send(status, json.dumps(obj).encode("utf-8"), "application/json")

    def do_GET(self):
        core: NodeCore = self.server.core
        parts = self.path.strip("/").split("/")
        try:
            if parts == ["healthz"]:
                self._send_json(
                    200, {"ok": True, "column": core.column, "rows": core.rows}
                )
            elif len(parts) == 2 and parts[0] == "frame":
                png, etag = core.frame_png(int(parts[1]))
                if self.headers.get("If-None-Match") == etag:
                    self.send_response(304)
                    self.send_header("ETag", etag)
                    self.send_header("Content-Length", "0")
                    self.end_headers()
                    return
                self._send(200, png, "image/png", {"ETag": etag})
            elif len(parts) == 2 and parts[0] == "atlas":
                png, _ = core.atlas_png(int(parts[1]))
                etag = hashlib.sha256(png).hexdigest()
                self._send(200, png, "image/png", {"ETag": etag})
            elif len(parts) == 3 and parts[0] == "atlas" and parts[2] == "descriptor":
                _, descriptor = core.atlas_png(int(parts[1]))
                self._send_json(200, descriptor)
            else:
                self._send_json(404, {"error": "not-found", "path": self.path})
        except (ArgumentError, ValueError) as exc:
            self._send_json(404, {"error": "bad-panel", "message": str(exc)})


class NodeService:
    """TCP control + HTTP frame servers wrapped around one NodeCore."""

    def __init__(
        self,
        column: int,
        rows: int,
        control_port: int,
        http_port: int,
        data_root: str | Path = ".",
        viewport: tuple[int, int] = DEFAULT_VIEWPORT,
        host: str = "127.0.0.1",
    ):
        self.core = NodeCore(column, rows, data_root, viewport)
        self._control = _ControlServer((host, control_port), _ControlHandler)
        self._control.core = self.core
        self._http = ThreadingHTTPServer((host, http_port), _NodeHTTPHandler)
        self._http.core = self.core
        self._control.http_port = self._http.server_address[1]
        self._threads: list[threading.Thread] = []

    @property
    def control_port(self) -> int:
        return self._control.server_address[1]

    @property
    def http_port(self) -> int:
        return self._http.server_address[1]

    def start(self) -> None:
        for srv, name in ((self._control, "control"), (self._http, "http")):
            t = threading.Thread(
                target=srv.serve_forever,
                name=f"node{self.core.column}-{name}",
                daemon=True,
            )
            t.start()
            self._threads.append(t)
        logger.info(
            "node column %d up: control :%d http :%d",
            self.core.column,
            self.control_port,
            self.http_port,
        )

    def stop(self) -> None:
        self._control.shutdown()
        self._http.shutdown()
        self._control.server_close()
        self._http.server_close()

    def serve_forever(self) -> None:
        self.start()
        try:
            while True:
                time.sleep(3600)
        except KeyboardInterrupt:
            self.stop()
