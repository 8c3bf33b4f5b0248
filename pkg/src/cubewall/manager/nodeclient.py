"""Manager-side TCP client for one render node.

One connection per node; writes are serialized under a lock and responses are
matched to pending requests by id, so many requests can be awaited
concurrently while the node executes them serially.
"""

from __future__ import annotations

import logging
import socket
import threading
import time
from concurrent.futures import Future, TimeoutError as FutureTimeout

from ..errors import FramingError, NodeUnavailableError, ProtocolMismatchError
from ..wire import Kind, WireMessage, decode, encode

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 10.0


class NodeClient:
    def __init__(
        self,
        column: int,
        host: str,
        control_port: int,
        http_port: int,
        timeout: float = DEFAULT_TIMEOUT,
    ):
        self.column = column
        self.host = host
        self.control_port = control_port
        self.http_port = http_port
        self.timeout = timeout
        self.rows: int | None = None
        self._sock: socket.socket | None = None
        self._send_lock = threading.Lock()
        self._pending_lock = threading.Lock()
        self._pending: dict[int, Future] = {}
        self._next_id = 1
        self._reader: threading.Thread | None = None
        self._closed = False

    def connect(self, retry_for: float = 15.0) -> None:
        """Dial the node, retrying while it boots, and consume its Hello."""
        deadline = time.monotonic() + retry_for
        last_exc: Exception | None = None
        while time.monotonic() < deadline:
            try:
                sock = socket.create_connection(
                    (self.host, self.control_port), timeout=self.timeout
                )
                break
            except OSError as exc:
                last_exc = exc
                time.sleep(0.1)
        else:
            raise NodeUnavailableError(
                f"node column {self.column} unreachable at "
                f"{self.host}:{self.control_port}: {last_exc}"
            )
        sock.settimeout(self.timeout)
        reader = sock.makefile("rb")
        hello = decode(reader.readline())
        if hello.kind is not Kind.HELLO:
            raise ProtocolMismatchError(
                f"expected Hello from node, got {hello.kind.value}"
            )
        announced = hello.payload.get("column")
        if announced != self.column:
            raise ProtocolMismatchError(
                f"node announced column {announced}, config says {self.column}"
            )
        self.rows = hello.payload.get("rows")
        self._sock = sock
        self._reader_file = reader
        self._reader = threading.Thread(
            target=self._read_loop, name=f"nodeclient-{self.column}", daemon=True
        )
        self._reader.start()

    def _read_loop(self) -> None:
        try:
            while True:
                line = self._reader_file.readline()
                if not line:
                    break
                try:
                    msg = decode(line)
                except (FramingError, ProtocolMismatchError) as exc:
                    logger.warning("node %d: bad frame: %s", self.column, exc.message)
                    break
                with self._pending_lock:
                    fut = self._pending.pop(msg.id, None)
                if fut is not None and not fut.done():
                    fut.set_result(msg)
        except OSError:
            pass
        finally:
            self._fail_pending("connection to node lost")

    def _fail_pending(self, why: str) -> None:
        with self._pending_lock:
            pending, self._pending = self._pending, {}
        for fut in pending.values():
            if not fut.done():
                fut.set_exception(
                    NodeUnavailableError(f"node column {self.column}: {why}")
                )

    def request_async(
        self, kind: Kind, payload: dict | None = None, panel: int | None = None
    ) -> Future:
        """Send one request; the Future resolves with the response message."""
        if self._sock is None:
            fut: Future = Future()
            fut.set_exception(
                NodeUnavailableError(f"node column {self.column} not connected")
            )
            return fut
        fut = Future()
        with self._send_lock:
            msg = WireMessage(
                id=self._next_id, kind=kind, payload=payload or {}, panel=panel
            )
            self._next_id += 1
            with self._pending_lock:
                self._pending[msg.id] = fut
            try:
                self._sock.sendall(encode(msg))
            except OSError as exc:
                with self._pending_lock:
                    self._pending.pop(msg.id, None)
                if not fut.done():
                    fut.set_exception(
                        NodeUnavailableError(
                            f"node column {self.column}: send failed: {exc}"
                        )
                    )
        return fut

    def request(
        self, kind: Kind, payload: dict | None = None, panel: int | None = None
    ) -> WireMessage:
        return self.wait(self.request_async(kind, payload, panel))

    def wait(self, fut: Future) -> WireMessage:
        try:
            return fut.result(timeout=self.timeout)
        except FutureTimeout:
            raise NodeUnavailableError(
                f"node column {self.column} timed out after {self.timeout}s"
            ) from None

    def http_url(self, path: str) -> str:
        return f"http://{self.host}:{self.http_port}{path}"

    def close(self) -> None:
        self._closed = True
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
        self._fail_pending("client closed")
