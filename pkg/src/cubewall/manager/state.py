"""Global state as a pure fold over session events.

Every transition validates against the current state before it is applied;
the manager only logs events that passed, which keeps replay total and
deterministic. The state hash covers data organisation (occupancy, shared
camera/params, sort provenance, load provenance) and deliberately excludes
timestamps and the selection set, which are presentation state.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from ..errors import TransitionError
from ..model import (
    Action,
    CameraState,
    GridConfig,
    GridState,
    RenderParams,
    SessionEvent,
    SlotAddress,
    linear_to_slot,
    slot_to_linear,
    validate_state,
)

__all__ = ["GlobalState", "apply_event", "apply_reorder", "fold_events", "state_hash"]


@dataclass
class GlobalState:
    """GridState plus per-cube load provenance (file path and the seq of the
    event that loaded it)."""

    grid_state: GridState
    provenance: dict[str, dict] = field(default_factory=dict)
    seq: int = 0

    @classmethod
    def empty(cls, grid: GridConfig) -> "GlobalState":
        return cls(grid_state=GridState(grid=grid))

    @property
    def grid(self) -> GridConfig:
        return self.grid_state.grid

    def copy(self) -> "GlobalState":
        return GlobalState(
            grid_state=self.grid_state.copy(),
            provenance={k: dict(v) for k, v in self.provenance.items()},
            seq=self.seq,
        )

    def to_payload(self) -> dict:
        gs = self.grid_state
        return {
            "grid": {"columns": gs.grid.columns, "rows": gs.grid.rows},
            "occupancy": {
                slot.label(): cid for slot, cid in sorted(gs.occupied().items())
            },
            "selection": sorted(s.label() for s in gs.selection),
            "params": gs.params.to_payload(),
            "camera": gs.camera.to_payload(),
            "sort": [list(k) for k in gs.sort_state],
            "provenance": {k: dict(v) for k, v in sorted(self.provenance.items())},
            "seq": self.seq,
        }


def state_hash(state: GlobalState) -> str:
    """SHA-256 over the canonical serialization, excluding timestamps (never
    part of state) and the selection set."""
    payload = state.to_payload()
    del payload["selection"]
    del payload["seq"]
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _parse_slot(state: GlobalState, label: str) -> SlotAddress:
    slot = SlotAddress.parse(label)
    if not state.grid.contains(slot):
        raise TransitionError(
            f"slot {label} outside the {state.grid.columns}x{state.grid.rows} grid"
        )
    return slot


def _drop_cube(state: GlobalState, cube_id: str | None) -> None:
    if cube_id is not None:
        state.provenance.pop(cube_id, None)


def _apply_load(state: GlobalState, ev: SessionEvent) -> None:
    assignments = ev.payload.get("assignments", [])
    if not assignments:
        raise TransitionError("LoadData carries no assignments")
    slots = [_parse_slot(state, a["slot"]) for a in assignments]
    ids = [a["id"] for a in assignments]
    if len(set(slots)) != len(slots):
        raise TransitionError("LoadData assigns one slot twice")
    if len(set(ids)) != len(ids):
        raise TransitionError("LoadData assigns one cube twice")
    occ = state.grid_state.occupancy
    for slot, a in zip(slots, assignments):
        cube_id = a["id"]
        # Move semantics: a cube already on the wall leaves its old slot, and
        # the slot's previous occupant is replaced. Keeps occupancy bijective.
        old_slot = state.grid_state.slot_of(cube_id)
        if old_slot is not None and old_slot != slot:
            occ[old_slot] = None
        _drop_cube(state, occ[slot] if occ[slot] != cube_id else None)
        occ[slot] = cube_id
        state.provenance[cube_id] = {"path": a["path"], "seq": ev.seq}
    if "sort" in ev.payload:
        state.grid_state.sort_state = [tuple(k) for k in ev.payload["sort"]]


def _apply_unload(state: GlobalState, ev: SessionEvent) -> None:
    occ = state.grid_state.occupancy
    for label in ev.payload.get("slots", []):
        slot = _parse_slot(state, label)
        _drop_cube(state, occ[slot])
        occ[slot] = None


def _apply_swap(state: GlobalState, ev: SessionEvent) -> None:
    a = _parse_slot(state, ev.payload["a"])
    b = _parse_slot(state, ev.payload["b"])
    if a == b:
        raise TransitionError("Swap needs two different slots")
    occ = state.grid_state.occupancy
    occ[a], occ[b] = occ[b], occ[a]


def apply_reorder(state: GlobalState, src: SlotAddress, dst: SlotAddress) -> GlobalState:
    """Cascading move: the cube at ``src`` is reinserted at ``dst`` in the
    column-first sequence; every slot strictly between shifts one linear
    position toward the origin slot. Empty slots shift like occupied ones."""
    grid = state.grid
    if not grid.contains(src) or not grid.contains(dst):
        raise TransitionError("Reorder slot outside the grid")
    occ_before = state.grid_state.occupancy
    if occ_before[src] is None:
        raise TransitionError(f"Reorder source {src.label()} is empty")
    if src == dst:
        raise TransitionError("Reorder needs two different slots")
    new_state = state.copy()
    occ = new_state.grid_state.occupancy
    p = slot_to_linear(src, grid)
    q = slot_to_linear(dst, grid)
    moved = occ[src]
    if p < q:
        for i in range(p, q):
            occ[linear_to_slot(i, grid)] = occ[linear_to_slot(i + 1, grid)]
    else:
        for i in range(p, q, -1):
            occ[linear_to_slot(i, grid)] = occ[linear_to_slot(i - 1, grid)]
    occ[dst] = moved
    return new_state


def _apply_select(state: GlobalState, ev: SessionEvent) -> None:
    slots = {_parse_slot(state, label) for label in ev.payload.get("slots", [])}
    state.grid_state.selection = slots


def apply_event(state: GlobalState, ev: SessionEvent) -> GlobalState:
    """Pure transition; raises TransitionError for events that are invalid
    against the current state (such events must never be logged)."""
    new_state = state.copy()
    action = ev.action
    if action is Action.LOAD_DATA:
        _apply_load(new_state, ev)
    elif action is Action.UNLOAD:
        _apply_unload(new_state, ev)
    elif action is Action.SWAP:
        _apply_swap(new_state, ev)
    elif action is Action.REORDER:
        src = _parse_slot(new_state, ev.payload["from"])
        dst = _parse_slot(new_state, ev.payload["to"])
        new_state = apply_reorder(new_state, src, dst)
    elif action is Action.SELECT:
        _apply_select(new_state, ev)
    elif action is Action.SET_CAMERA:
        new_state.grid_state.camera = CameraState.from_payload(ev.payload)
    elif action is Action.SET_PARAMS:
        new_state.grid_state.params = RenderParams.from_payload(ev.payload)
    elif action is Action.SET_CLIP:
        new_state.grid_state.params = new_state.grid_state.params.with_clip(
            ev.payload["clip_lo"], ev.payload["clip_hi"]
        )
    elif action is Action.CHECKPOINT:
        if not ev.payload.get("name"):
            raise TransitionError("Checkpoint needs a name")
    else:  # pragma: no cover - enum is closed
        raise TransitionError(f"unknown action {action}")
    new_state.seq = ev.seq
    violations = validate_state(new_state.grid_state, new_state.grid)
    if violations:  # pragma: no cover - transitions preserve invariants
        raise TransitionError("; ".join(violations))
    return new_state


def fold_events(
    events: list[SessionEvent], grid: GridConfig, upto: int | None = None
) -> GlobalState:
    """Left fold from the empty state; ``upto`` stops after that seq."""
    state = GlobalState.empty(grid)
    for ev in events:
        if upto is not None and ev.seq > upto:
            break
        state = apply_event(state, ev)
    return state
