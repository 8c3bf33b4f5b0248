"""The manager: metadata server, FIFO scheduler, fan-out hub, and workflow
serializer.

Mutating commands enter a FIFO queue consumed by a single thread: it
validates the command against the current state, appends the session event,
updates the global state, fans wire messages out to the affected nodes, and
waits for all responses before starting the next command. Node failures
resolve the ticket with a node-unavailable error but the logical state still
advances (the wall may lag; the warning says so).

Read-only endpoints serve a consistent snapshot without entering the queue.
"""

from __future__ import annotations

import json
import logging
import queue
import threading
import urllib.error
import urllib.request
from concurrent.futures import Future
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any
from urllib.parse import parse_qs, urlparse

from ..catalog import SurveyCatalog, layout_order
from ..errors import ArgumentError, CubewallError, NodeUnavailableError
from ..model import (
    Action,
    CameraState,
    GridConfig,
    RenderParams,
    SessionEvent,
    SlotAddress,
    slot_to_linear,
)
from ..volume import parse_stat_kind
from ..wire import Kind
from .nodeclient import NodeClient
from .session import SessionLog, replay, save_session
from .state import GlobalState, apply_event, state_hash

logger = logging.getLogger(__name__)

CLIP_ONLY_KEYS = {"clip_lo", "clip_hi"}


class ManagerCore:
    """State owner and scheduler; one mutating consumer, many readers."""

    def __init__(
        self,
        grid: GridConfig,
        catalog: SurveyCatalog,
        clients: dict[int, NodeClient] | None = None,
        session_sink: Path | None = None,
    ):
        self.grid = grid
        self.catalog = catalog
        self.clients = clients or {}
        self.session_sink = session_sink
        self.state = GlobalState.empty(grid)
        self.log = SessionLog()
        self._state_lock = threading.Lock()
        self._queue: queue.Queue[tuple[dict, Future] | None] = queue.Queue()
        self._consumer = threading.Thread(
            target=self._consume, name="manager-consumer", daemon=True
        )
        self._consumer.start()
        if self.session_sink is not None:
            self._write_session_file()

    # -- public API ----------------------------------------------------------

    def submit(self, command: dict) -> Future:
        """Queue a command; the ticket resolves with the aggregated result."""
        ticket: Future = Future()
        self._queue.put((command, ticket))
        return ticket

    def run(self, command: dict) -> dict:
        return self.submit(command).result()

    def snapshot(self) -> dict:
        """Consistent read-only view of the global state."""
        with self._state_lock:
            payload = self.state.to_payload()
            payload["state_hash"] = state_hash(self.state)
            payload["checkpoints"] = dict(self.log.checkpoints)
            payload["nodes"] = {
                str(c): {"host": cl.host, "http_port": cl.http_port}
                for c, cl in self.clients.items()
            }
        return payload

    def session_bytes(self) -> bytes:
        with self._state_lock:
            return save_session(self.log, self.grid)

    def owner_of(self, slot: SlotAddress) -> NodeClient:
        client = self.clients.get(slot.column)
        if client is None:
            raise NodeUnavailableError(
                f"no node configured for column {slot.column}"
            )
        return client

    def close(self) -> None:
        self._queue.put(None)
        self._consumer.join(timeout=5)
        for client in self.clients.values():
            client.close()

    # -- consumer ------------------------------------------------------------

    def _consume(self) -> None:
        while True:
            item = self._queue.get()
            if item is None:
                return
            command, ticket = item
            try:
                result = self._execute(command)
            except CubewallError as exc:
                result = {"ok": False, "error": {"code": exc.code, "message": exc.message}}
            except Exception as exc:  # pragma: no cover - defensive
                logger.exception("command failed unexpectedly")
                result = {"ok": False, "error": {"code": "internal", "message": str(exc)}}
            if not ticket.done():
                ticket.set_result(result)

    def _execute(self, command: dict) -> dict:
        op = command.get("op")
        if op == "load":
            return self._cmd_load(command)
        if op == "unload":
            return self._mutate(Action.UNLOAD, {"slots": list(command["slots"])})
        if op == "swap":
            return self._mutate(Action.SWAP, {"a": command["a"], "b": command["b"]})
        if op == "reorder":
            return self._mutate(
                Action.REORDER, {"from": command["from"], "to": command["to"]}
            )
        if op == "select":
            return self._mutate(Action.SELECT, {"slots": list(command["slots"])})
        if op == "camera":
            merged = {**self.state.grid_state.camera.to_payload(), **command["values"]}
            return self._mutate(Action.SET_CAMERA, CameraState.from_payload(merged).to_payload())
        if op == "params":
            values = dict(command["values"])
            if values and set(values) <= CLIP_ONLY_KEYS:
                current = self.state.grid_state.params
                clip = {
                    "clip_lo": float(values.get("clip_lo", current.clip_lo)),
                    "clip_hi": float(values.get("clip_hi", current.clip_hi)),
                }
                return self._mutate(Action.SET_CLIP, clip)
            merged = {**self.state.grid_state.params.to_payload(), **values}
            return self._mutate(Action.SET_PARAMS, RenderParams.from_payload(merged).to_payload())
        if op == "checkpoint":
            return self._mutate(Action.CHECKPOINT, {"name": command["name"]})
        if op == "replay":
            return self._cmd_replay(command.get("upto"))
        if op == "query_histogram":
            return self._cmd_query_histogram(command)
        if op == "query_scatter":
            return self._cmd_query_scatter(command)
        raise ArgumentError(f"unknown command op {op!r}")

    def _cmd_load(self, command: dict) -> dict:
        if "ids" in command:
            ids = list(command["ids"])
            placement = layout_order(ids, self.grid)
            assignments = [
                {"slot": slot.label(), "id": cid, "path": self._path_of(cid)}
                for slot, cid in sorted(
                    placement.items(), key=lambda kv: slot_to_linear(kv[0], self.grid)
                )
            ]
        else:
            cid = command["id"]
            assignments = [
                {"slot": command["slot"], "id": cid, "path": self._path_of(cid)}
            ]
        payload: dict[str, Any] = {"assignments": assignments}
        if command.get("sort"):
            payload["sort"] = [list(k) for k in command["sort"]]
        return self._mutate(Action.LOAD_DATA, payload)

    def _path_of(self, cube_id: str) -> str:
        try:
            return self.catalog.get(cube_id).path
        except KeyError:
            raise ArgumentError(f"unknown cube id {cube_id!r}") from None

    def _mutate(self, action: Action, payload: dict) -> dict:
        """Validate, log, apply, fan out, and barrier on one event."""
        with self._state_lock:
            # Branch-on-write: a replay may have moved the cursor back; new
            # events rewrite history from there.
            if self.state.seq < self.log.last_seq:
                self.log.truncate(self.state.seq)
                self._write_session_file()
            candidate = SessionEvent(
                seq=self.log.last_seq + 1,
                timestamp=0,
                action=action,
                payload=payload,
            )
            new_state = apply_event(self.state, candidate)  # raises on invalid
            before = self.state
            ev = self.log.append(action, payload)
            assert ev.seq == candidate.seq
            self.state = new_state
            self._append_session_line(ev)
        messages = fan_out(ev, before, new_state, sorted(self.clients))
        warnings = self._send_barrier(messages)
        result = {
            "ok": not warnings,
            "seq": ev.seq,
            "state_hash": state_hash(new_state),
            "warnings": warnings,
        }
        if warnings:
            result["error"] = {
                "code": "node-unavailable",
                "message": "state advanced but some nodes lagged",
            }
        return result

    def _send_barrier(self, messages: list[tuple[int, Kind, int | None, dict]]) -> list[dict]:
        """Send every message, then wait for every response."""
        sent = []
        for column, kind, panel, payload in messages:
            client = self.clients.get(column)
            if client is None:
                sent.append((column, panel, None))
                continue
            sent.append((column, panel, (client, client.request_async(kind, payload, panel))))
        warnings = []
        for column, panel, handle in sent:
            if handle is None:
                warnings.append(
                    {"column": column, "panel": panel, "code": "node-unavailable",
                     "message": f"no node configured for column {column}"}
                )
                continue
            client, fut = handle
            try:
                reply = client.wait(fut)
            except NodeUnavailableError as exc:
                warnings.append(
                    {"column": column, "panel": panel, "code": exc.code,
                     "message": exc.message}
                )
                continue
            if reply.kind is Kind.ERROR:
                warnings.append(
                    {"column": column, "panel": panel,
                     "code": reply.payload.get("code", "error"),
                     "message": reply.payload.get("message", "")}
                )
        return warnings

    def _cmd_replay(self, upto) -> dict:
        with self._state_lock:
            target = replay(self.log, self.grid, upto)
            self.state = target
        # Refresh every panel from scratch: load what the target occupies,
        # unload the rest, and re-broadcast the shared camera/params.
        messages: list[tuple[int, Kind, int | None, dict]] = []
        occ = target.grid_state.occupancy
        for slot in self.grid.all_slots():
            if slot.column not in self.clients:
                continue
            cid = occ[slot]
            if cid is not None:
                messages.append(
                    (slot.column, Kind.LOAD, slot.row,
                     {"id": cid, "path": target.provenance[cid]["path"]})
                )
            else:
                messages.append((slot.column, Kind.UNLOAD, slot.row, {}))
        for column in sorted(self.clients):
            messages.append(
                (column, Kind.SET_CAMERA, None, target.grid_state.camera.to_payload())
            )
            messages.append(
                (column, Kind.SET_PARAMS, None, target.grid_state.params.to_payload())
            )
        warnings = self._send_barrier(messages)
        return {
            "ok": not warnings,
            "seq": target.seq,
            "state_hash": state_hash(target),
            "warnings": warnings,
        }

    def _cmd_query_histogram(self, command: dict) -> dict:
        slot = SlotAddress.parse(command["slot"])
        if not self.grid.contains(slot):
            raise ArgumentError(f"slot {command['slot']} outside the grid")
        with self._state_lock:
            occupant = self.state.grid_state.occupancy[slot]
        if occupant is None:
            raise ArgumentError(f"slot {slot.label()} has no data")
        payload = {"bins": int(command.get("bins", 256))}
        if command.get("lo") is not None:
            payload["lo"] = float(command["lo"])
        if command.get("hi") is not None:
            payload["hi"] = float(command["hi"])
        reply = self.owner_of(slot).request(Kind.QUERY_HISTOGRAM, payload, slot.row)
        if reply.kind is Kind.ERROR:
            return {"ok": False, "error": reply.payload}
        return {"ok": True, "slot": slot.label(), "id": occupant,
                "histogram": reply.payload}

    def _cmd_query_scatter(self, command: dict) -> dict:
        x_field = command["x"]
        if x_field not in self.catalog.columns:
            raise ArgumentError(f"unknown catalog field {x_field!r}")
        kind, level = parse_stat_kind(command["y"])
        payload: dict[str, Any] = {"kind": kind}
        if level is not None:
            payload["level"] = level
        with self._state_lock:
            occupied = sorted(
                self.state.grid_state.occupied().items(),
                key=lambda kv: slot_to_linear(kv[0], self.grid),
            )
        requests = []
        for slot, cid in occupied:
            try:
                client = self.owner_of(slot)
            except NodeUnavailableError as exc:
                requests.append((slot, cid, None, exc))
                continue
            requests.append(
                (slot, cid, (client, client.request_async(Kind.QUERY_STAT, payload, slot.row)), None)
            )
        points, warnings = [], []
        numeric = x_field in self.catalog.numeric_columns
        for slot, cid, handle, early_exc in requests:
            if handle is None:
                warnings.append({"slot": slot.label(), "id": cid,
                                 "code": early_exc.code, "message": early_exc.message})
                continue
            client, fut = handle
            try:
                reply = client.wait(fut)
            except NodeUnavailableError as exc:
                warnings.append({"slot": slot.label(), "id": cid,
                                 "code": exc.code, "message": exc.message})
                continue
            if reply.kind is Kind.ERROR:
                warnings.append({"slot": slot.label(), "id": cid,
                                 "code": reply.payload.get("code", "error"),
                                 "message": reply.payload.get("message", "")})
                continue
            cell = self.catalog.get(cid).values.get(x_field, "")
            x: Any
            if cell.strip() == "":
                x = None
            elif numeric:
                x = float(cell)
            else:
                x = cell
            points.append({"slot": slot.label(), "id": cid, "x": x,
                           "y": reply.payload["value"]})
        return {"ok": True, "x_field": x_field, "y_stat": command["y"],
                "points": points, "warnings": warnings}

    # -- session persistence ---------------------------------------------------

    def _write_session_file(self) -> None:
        if self.session_sink is None:
            return
        self.session_sink.parent.mkdir(parents=True, exist_ok=True)
        self.session_sink.write_bytes(save_session(self.log, self.grid))

    def _append_session_line(self, ev: SessionEvent) -> None:
        if self.session_sink is None:
            return
        line = json.dumps(ev.to_json_obj(), sort_keys=True, separators=(",", ":"))
        with self.session_sink.open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")

def fan_out(
    ev: SessionEvent,
    before: GlobalState,
    after: GlobalState,
    columns: list[int],
) -> list[tuple[int, Kind, int | None, dict]]:
    """Translate an applied event into the minimal set of node messages.

    Camera/params changes broadcast to every node; occupancy changes become
    exactly one Load or Unload per panel whose cube changed (the diff of
    occupancy before vs after). Selection and checkpoints touch no node.
    """
    if ev.action is Action.SET_CAMERA:
        return [(c, Kind.SET_CAMERA, None, dict(ev.payload)) for c in columns]
    if ev.action is Action.SET_PARAMS:
        return [(c, Kind.SET_PARAMS, None, dict(ev.payload)) for c in columns]
    if ev.action is Action.SET_CLIP:
        return [(c, Kind.SET_CLIP, None, dict(ev.payload)) for c in columns]
    if ev.action in (Action.SELECT, Action.CHECKPOINT):
        return []

    messages: list[tuple[int, Kind, int | None, dict]] = []
    occ_before = before.grid_state.occupancy
    occ_after = after.grid_state.occupancy
    for slot in after.grid.all_slots():
        old, new = occ_before[slot], occ_after[slot]
        if old == new:
            continue
        if new is not None:
            messages.append(
                (slot.column, Kind.LOAD, slot.row,
                 {"id": new, "path": after.provenance[new]["path"]})
            )
        else:
            messages.append((slot.column, Kind.UNLOAD, slot.row, {}))
    return messages


# -- HTTP layer ----------------------------------------------------------------


def _status_for(code: str) -> int:
    if code in ("not-found",):
        return 404
    if code in ("internal",):
        return 500
    return 400


class _ManagerHTTPHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):
        logger.debug("http: " + fmt, *args)

    @property
    def core(self) -> ManagerCore:
        return self.server.core

    def _send(self, status: int, body: bytes, content_type: str,
              extra: dict | None = None) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        for k, v in (extra or {}).items():
            self.send_header(k, v)
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, obj) -> None:
        self._send(status, json.dumps(obj).encode("utf-8"), "application/json")

    def _send_error_obj(self, exc: CubewallError) -> None:
        self._send_json(
            _status_for(exc.code),
            {"ok": False, "error": {"code": exc.code, "message": exc.message}},
        )

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length", 0))
        if length == 0:
            return {}
        try:
            return json.loads(self.rfile.read(length).decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise ArgumentError(f"request body is not JSON: {exc}") from exc

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        q = {k: v[0] for k, v in parse_qs(url.query).items()}
        try:
            if parts == ["healthz"]:
                self._send_json(200, {"ok": True, "role": "manager"})
            elif parts == ["catalog"]:
                self._send_json(200, self.core.catalog.to_payload())
            elif parts == ["state"]:
                self._send_json(200, self.core.snapshot())
            elif parts == ["colormaps"]:
                from importlib import resources

                text = resources.files("cubewall").joinpath("colormaps.json").read_text("utf-8")
                self._send(200, text.encode("utf-8"), "application/json")
            elif parts == ["session", "log"]:
                self._send(200, self.core.session_bytes(), "application/x-ndjson")
            elif parts[:2] == ["query", "histogram"]:
                result = self.core.run({"op": "query_histogram", **q})
                self._send_json(200 if result.get("ok") else 400, result)
            elif parts[:2] == ["query", "scatter"]:
                result = self.core.run({"op": "query_scatter", **q})
                self._send_json(200 if result.get("ok") else 400, result)
            elif len(parts) == 2 and parts[0] == "frames":
                self._proxy_node(parts[1], "frame")
            elif len(parts) == 2 and parts[0] == "atlas":
                self._proxy_node(parts[1], "atlas")
            elif len(parts) == 3 and parts[0] == "atlas" and parts[2] == "descriptor":
                self._proxy_node(parts[1], "atlas", "/descriptor")
            elif self.server.static_dir is not None and (not parts or parts[0] == "ui"):
                self._serve_static(parts[1:] if parts else [])
            else:
                self._send_json(404, {"ok": False, "error": {"code": "not-found",
                                                             "message": url.path}})
        except CubewallError as exc:
            self._send_error_obj(exc)

    def do_POST(self):
        parts = [p for p in self.path.split("?")[0].split("/") if p]
        try:
            body = self._read_body()
            if parts[:1] == ["commands"] and len(parts) == 2:
                result = self._dispatch_command(parts[1], body)
            elif parts == ["session", "checkpoint"]:
                result = self.core.run({"op": "checkpoint", "name": body.get("name", "")})
            elif parts == ["session", "replay"]:
                result = self.core.run({"op": "replay", "upto": body.get("upto")})
            else:
                self._send_json(404, {"ok": False, "error": {"code": "not-found",
                                                             "message": self.path}})
                return
            if result.get("ok"):
                self._send_json(200, result)
            else:
                code = result.get("error", {}).get("code", "error")
                # Node lag still advances state; signal with 200 + ok:false.
                status = 200 if code == "node-unavailable" else _status_for(code)
                self._send_json(status, result)
        except CubewallError as exc:
            self._send_error_obj(exc)

    def _dispatch_command(self, name: str, body: dict) -> dict:
        if name == "load":
            command = {"op": "load"}
            for key in ("ids", "id", "slot", "sort"):
                if key in body:
                    command[key] = body[key]
            if "ids" not in command and "id" not in command:
                raise ArgumentError("load needs ids or id+slot")
            if "id" in command and "slot" not in command:
                raise ArgumentError("targeted load needs a slot")
            return self.core.run(command)
        if name == "unload":
            return self.core.run({"op": "unload", "slots": body.get("slots", [])})
        if name == "swap":
            return self.core.run({"op": "swap", "a": body["a"], "b": body["b"]})
        if name == "reorder":
            return self.core.run({"op": "reorder", "from": body["from"], "to": body["to"]})
        if name == "select":
            return self.core.run({"op": "select", "slots": body.get("slots", [])})
        if name == "camera":
            return self.core.run({"op": "camera", "values": body})
        if name == "params":
            return self.core.run({"op": "params", "values": body})
        raise ArgumentError(f"unknown command endpoint {name!r}")

    def _proxy_node(self, slot_label: str, endpoint: str, suffix: str = "") -> None:
        slot = SlotAddress.parse(slot_label)
        if not self.core.grid.contains(slot):
            raise ArgumentError(f"slot {slot_label} outside the grid")
        client = self.core.owner_of(slot)
        url = client.http_url(f"/{endpoint}/{slot.row}{suffix}")
        request = urllib.request.Request(url)
        if self.headers.get("If-None-Match"):
            request.add_header("If-None-Match", self.headers["If-None-Match"])
        try:
            with urllib.request.urlopen(request, timeout=10) as resp:
                body = resp.read()
                self._send(
                    resp.status,
                    body,
                    resp.headers.get("Content-Type", "application/octet-stream"),
                    {"ETag": resp.headers["ETag"]} if resp.headers.get("ETag") else None,
                )
        except urllib.error.HTTPError as exc:
            if exc.code == 304:
                self.send_response(304)
                if exc.headers.get("ETag"):
                    self.send_header("ETag", exc.headers["ETag"])
                self.send_header("Content-Length", "0")
                self.end_headers()
            else:
                self._send_json(exc.code, {"ok": False, "error": {
                    "code": "node-http", "message": str(exc)}})
        except OSError as exc:
            self._send_json(502, {"ok": False, "error": {
                "code": "node-unavailable", "message": str(exc)}})

    def _serve_static(self, parts: list[str]) -> None:
        rel = "/".join(parts) or "index.html"
        base = Path(self.server.static_dir).resolve()
        target = (base / rel).resolve()
        if not str(target).startswith(str(base)) or not target.is_file():
            self._send_json(404, {"ok": False, "error": {"code": "not-found",
                                                         "message": rel}})
            return
        types = {".html": "text/html", ".js": "text/javascript",
                 ".css": "text/css", ".map": "application/json",
                 ".json": "application/json", ".png": "image/png",
                 ".svg": "image/svg+xml"}
        ctype = types.get(target.suffix.lower(), "application/octet-stream")
        self._send(200, target.read_bytes(), ctype)


class ManagerService:
    """HTTP front end wrapped around one ManagerCore."""

    def __init__(
        self,
        core: ManagerCore,
        port: int = 0,
        host: str = "127.0.0.1",
        static_dir: Path | None = None,
    ):
        self.core = core
        self._http = ThreadingHTTPServer((host, port), _ManagerHTTPHandler)
        self._http.core = core
        self._http.static_dir = static_dir
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._http.server_address[1]

    def start(self) -> None:
        self._thread = threading.Thread(
            target=self._http.serve_forever, name="manager-http", daemon=True
        )
        self._thread.start()
        logger.info("manager http on :%d", self.port)

    def stop(self) -> None:
        self._http.shutdown()
        self._http.server_close()
        self.core.close()
