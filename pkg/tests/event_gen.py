"""Random-but-valid session event generator for fold/replay determinism
tests: every generated event is constructed to pass validation against the
state it will be applied to."""

from __future__ import annotations

import random

from cubewall.manager.state import GlobalState, apply_event
from cubewall.model import Action, GridConfig, SessionEvent

COLOUR_MAPS = ["grey", "heat", "viridis"]


def generate_session(
    rng: random.Random, grid: GridConfig, n_events: int
) -> list[SessionEvent]:
    state = GlobalState.empty(grid)
    pool = [f"cube{i}" for i in range(grid.slot_count + 4)]
    events: list[SessionEvent] = []
    seq = 0
    while len(events) < n_events:
        action = rng.choice(
            [
                Action.LOAD_DATA, Action.LOAD_DATA, Action.UNLOAD, Action.SWAP,
                Action.REORDER, Action.SELECT, Action.SET_CAMERA,
                Action.SET_PARAMS, Action.SET_CLIP, Action.CHECKPOINT,
            ]
        )
        payload = _payload_for(rng, state, pool, action)
        if payload is None:
            continue
        seq += 1
        ev = SessionEvent(
            seq=seq,
            timestamp=rng.randrange(1_600_000_000_000, 1_900_000_000_000),
            action=action,
            payload=payload,
        )
        state = apply_event(state, ev)
        events.append(ev)
    return events


def _payload_for(rng, state: GlobalState, pool, action: Action):
    grid = state.grid
    slots = grid.all_slots()
    occupied = [s for s in slots if state.grid_state.occupancy[s] is not None]
    if action is Action.LOAD_DATA:
        count = rng.randint(1, min(4, grid.slot_count))
        chosen_slots = rng.sample(slots, count)
        chosen_ids = rng.sample(pool, count)
        payload = {
            "assignments": [
                {"slot": s.label(), "id": cid, "path": f"{cid}.raw"}
                for s, cid in zip(chosen_slots, chosen_ids)
            ]
        }
        if rng.random() < 0.3:
            payload["sort"] = [["dim", rng.choice(["ascending", "descending"])]]
        return payload
    if action is Action.UNLOAD:
        if not occupied:
            return None
        chosen = rng.sample(occupied, rng.randint(1, len(occupied)))
        return {"slots": [s.label() for s in chosen]}
    if action is Action.SWAP:
        if grid.slot_count < 2:
            return None
        a, b = rng.sample(slots, 2)
        return {"a": a.label(), "b": b.label()}
    if action is Action.REORDER:
        if not occupied or grid.slot_count < 2:
            return None
        src = rng.choice(occupied)
        dst = rng.choice([s for s in slots if s != src])
        return {"from": src.label(), "to": dst.label()}
    if action is Action.SELECT:
        count = rng.randint(0, min(5, grid.slot_count))
        return {"slots": [s.label() for s in rng.sample(slots, count)]}
    if action is Action.SET_CAMERA:
        return {
            "azimuth": round(rng.uniform(-180, 180), 3),
            "elevation": round(rng.uniform(-90, 90), 3),
            "roll": round(rng.uniform(-180, 180), 3),
            "zoom": round(rng.uniform(0.2, 5.0), 3),
            "pan": [round(rng.uniform(-0.5, 0.5), 3), round(rng.uniform(-0.5, 0.5), 3)],
        }
    if action is Action.SET_PARAMS:
        lo = round(rng.uniform(0, 0.5), 3)
        return {
            "sample_step": round(rng.uniform(0.2, 1.5), 3),
            "opacity_scale": round(rng.uniform(0, 1), 3),
            "colour_map": rng.choice(COLOUR_MAPS),
            "clip_lo": lo,
            "clip_hi": round(rng.uniform(lo, 1.0), 3),
            "iso_level": round(rng.uniform(0, 1), 3),
            "mode": rng.choice(["volume", "isosurface"]),
        }
    if action is Action.SET_CLIP:
        lo = round(rng.uniform(0, 0.6), 3)
        return {"clip_lo": lo, "clip_hi": round(rng.uniform(lo, 1.0), 3)}
    if action is Action.CHECKPOINT:
        return {"name": f"mark-{rng.randrange(10_000)}"}
    return None
