"""Manager<->node wire protocol: newline-delimited canonical JSON over TCP.

One message per line; the canonical form (UTF-8, sorted keys, no
insignificant whitespace) makes two encodings of the same message
byte-identical. Large binaries (frames, atlases) never travel on this
channel; they are fetched from the node's HTTP endpoint. The full field
reference lives in docs/protocol.md.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .errors import FramingError, ProtocolMismatchError

__all__ = ["Kind", "WireMessage", "encode", "decode", "IdValidator"]


class Kind(str, Enum):
    HELLO = "Hello"
    ACK = "Ack"
    ERROR = "Error"
    LOAD = "Load"
    UNLOAD = "Unload"
    SET_CAMERA = "SetCamera"
    SET_PARAMS = "SetParams"
    SET_CLIP = "SetClip"
    QUERY_HISTOGRAM = "QueryHistogram"
    QUERY_STAT = "QueryStat"
    RENDER_FRAME = "RenderFrame"
    BUILD_ATLAS = "BuildAtlas"


REQUEST_KINDS = frozenset(
    {
        Kind.LOAD,
        Kind.UNLOAD,
        Kind.SET_CAMERA,
        Kind.SET_PARAMS,
        Kind.SET_CLIP,
        Kind.QUERY_HISTOGRAM,
        Kind.QUERY_STAT,
        Kind.RENDER_FRAME,
        Kind.BUILD_ATLAS,
    }
)


@dataclass(frozen=True)
class WireMessage:
    """One framed message. ``id`` increases monotonically per connection;
    every non-Hello request gets exactly one Ack/Error bearing the same id.
    ``panel`` is the node-local row index where a command targets one
    panel."""

    id: int
    kind: Kind
    payload: dict[str, Any] = field(default_factory=dict)
    panel: int | None = None

    @classmethod
    def error(cls, msg_id: int, code: str, message: str) -> "WireMessage":
        return cls(
            id=msg_id, kind=Kind.ERROR, payload={"code": code, "message": message}
        )


def encode(msg: WireMessage) -> bytes:
    """Canonical single-line JSON frame, newline terminated."""
    obj: dict[str, Any] = {
        "id": msg.id,
        "kind": msg.kind.value,
        "payload": msg.payload,
    }
    if msg.panel is not None:
        obj["panel"] = msg.panel
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return text.encode("utf-8") + b"\n"


def decode(line: bytes) -> WireMessage:
    """Inverse of :func:`encode`. Unknown fields are ignored; an unknown kind
    raises :class:`ProtocolMismatchError` (the peer should answer with an
    Error); anything unparseable raises :class:`FramingError` and the
    connection should be reset."""
    try:
        obj = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FramingError(f"unparseable wire line: {exc}") from exc
    if not isinstance(obj, dict):
        raise FramingError("wire line is not a JSON object")
    try:
        msg_id = int(obj["id"])
    except (KeyError, TypeError, ValueError):
        raise FramingError("wire message lacks an integer id") from None
    kind_name = obj.get("kind")
    try:
        kind = Kind(kind_name)
    except ValueError:
        raise ProtocolMismatchError(
            f"unknown message kind {kind_name!r}; peer speaks a different "
            "protocol version",
            msg_id=msg_id,
        ) from None
    payload = obj.get("payload", {})
    if not isinstance(payload, dict):
        raise FramingError("payload must be a JSON object")
    panel = obj.get("panel")
    if panel is not None:
        panel = int(panel)
    return WireMessage(id=msg_id, kind=kind, payload=payload, panel=panel)


class IdValidator:
    """Enforces strictly increasing request ids on one connection."""

    def __init__(self):
        self.last_id: int | None = None

    def check(self, msg: WireMessage) -> None:
        if self.last_id is not None and msg.id <= self.last_id:
            raise ProtocolMismatchError(
                f"request id {msg.id} not greater than previous {self.last_id}",
                msg_id=msg.id,
            )
        self.last_id = msg.id
