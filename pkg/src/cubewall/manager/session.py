"""Append-only session log with JSON-lines persistence and replay.

File layout: a header line carrying the format version and grid shape,
followed by one event object per line. Loading validates that seq numbers
run gap-free from 1.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any

from ..errors import SessionError, TransitionError
from ..model import Action, GridConfig, SessionEvent
from .state import GlobalState, fold_events

__all__ = ["SessionLog", "save_session", "load_session", "replay"]

FORMAT_NAME = "cubewall-session"
FORMAT_VERSION = 1


def _now_ms() -> int:
    return int(time.time() * 1000)


@dataclass
class SessionLog:
    """Ordered events plus named checkpoints (name -> seq)."""

    events: list[SessionEvent] = field(default_factory=list)
    checkpoints: dict[str, int] = field(default_factory=dict)

    @property
    def last_seq(self) -> int:
        return self.events[-1].seq if self.events else 0

    def append(
        self,
        action: Action,
        payload: dict[str, Any],
        timestamp: int | None = None,
    ) -> SessionEvent:
        ev = SessionEvent(
            seq=self.last_seq + 1,
            timestamp=_now_ms() if timestamp is None else timestamp,
            action=action,
            payload=payload,
        )
        self.events.append(ev)
        if action is Action.CHECKPOINT:
            self.checkpoints[payload["name"]] = ev.seq
        return ev

    def truncate(self, upto: int) -> None:
        """Drop events after ``upto`` (branch-on-write after a replay)."""
        self.events = [ev for ev in self.events if ev.seq <= upto]
        self.checkpoints = {
            name: seq for name, seq in self.checkpoints.items() if seq <= upto
        }

    def resolve_seq(self, upto: int | str | None) -> int:
        """Turn a seq number or checkpoint name into a seq bound."""
        if upto is None:
            return self.last_seq
        if isinstance(upto, str) and not upto.isdigit():
            if upto not in self.checkpoints:
                raise SessionError(f"unknown checkpoint {upto!r}")
            return self.checkpoints[upto]
        seq = int(upto)
        if not 0 <= seq <= self.last_seq:
            raise SessionError(f"seq {seq} outside 0..{self.last_seq}")
        return seq


def save_session(log: SessionLog, grid: GridConfig) -> bytes:
    """Serialize as JSON lines: header first, then one event per line."""
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "grid": {"columns": grid.columns, "rows": grid.rows},
    }
    lines = [json.dumps(header, sort_keys=True, separators=(",", ":"))]
    lines.extend(
        json.dumps(ev.to_json_obj(), sort_keys=True, separators=(",", ":"))
        for ev in log.events
    )
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_session(blob: bytes) -> tuple[SessionLog, GridConfig]:
    """Parse and validate a session file: format name, version, and a
    gap-free seq chain starting at 1."""
    lines = [ln for ln in blob.decode("utf-8").splitlines() if ln.strip()]
    if not lines:
        raise SessionError("empty session file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise SessionError(f"unparseable session header: {exc}") from exc
    if header.get("format") != FORMAT_NAME:
        raise SessionError(f"not a {FORMAT_NAME} file")
    if header.get("version") != FORMAT_VERSION:
        raise SessionError(
            f"session version {header.get('version')} unsupported "
            f"(expected {FORMAT_VERSION})"
        )
    try:
        grid = GridConfig(
            columns=int(header["grid"]["columns"]),
            rows=int(header["grid"]["rows"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SessionError(f"bad grid in session header: {exc}") from exc

    log = SessionLog()
    for i, line in enumerate(lines[1:], start=1):
        try:
            ev = SessionEvent.from_json_obj(json.loads(line))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise SessionError(f"bad event at line {i + 1}: {exc}") from exc
        if ev.seq != i:
            raise SessionError(f"seq gap: expected {i}, found {ev.seq}")
        log.events.append(ev)
        if ev.action is Action.CHECKPOINT:
            log.checkpoints[ev.payload["name"]] = ev.seq
    return log, grid


def replay(
    log: SessionLog, grid: GridConfig, upto: int | str | None = None
) -> GlobalState:
    """Fold events 1..upto (a seq or a checkpoint name) over the empty
    state."""
    bound = log.resolve_seq(upto)
    try:
        return fold_events(log.events, grid, upto=bound)
    except TransitionError as exc:
        raise SessionError(f"session replays inconsistently: {exc}") from exc
