"""Domain types shared by every module: grid addressing, render/camera
parameters, session events, and query result shapes. Pure values, no I/O.

Slot addressing is 0-based linear internally; the letter/number form
("A1".."T4" on the full wall) is presentation only and is produced or parsed
at the edges.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any

from .errors import AddressError, ArgumentError

__all__ = [
    "SlotAddress",
    "GridConfig",
    "RenderParams",
    "CameraState",
    "RenderMode",
    "Action",
    "SessionEvent",
    "GridState",
    "Histogram",
    "StatPoint",
    "slot_to_linear",
    "linear_to_slot",
    "validate_state",
    "column_letters",
    "normalize_angle",
]


def column_letters(column: int) -> str:
    """Spreadsheet-style letters for a 0-based column index (A..Z, AA..)."""
    if column < 0:
        raise AddressError(f"negative column index {column}")
    letters = ""
    n = column
    while True:
        letters = string.ascii_uppercase[n % 26] + letters
        n = n // 26 - 1
        if n < 0:
            return letters


def _letters_to_column(letters: str) -> int:
    n = 0
    for ch in letters:
        if ch not in string.ascii_uppercase:
            raise AddressError(f"bad column letters {letters!r}")
        n = n * 26 + (ord(ch) - ord("A") + 1)
    return n - 1


@dataclass(frozen=True, order=True)
class SlotAddress:
    """One cell of the display grid: 0-based column, 1-based row."""

    column: int
    row: int

    def label(self) -> str:
        return f"{column_letters(self.column)}{self.row}"

    @classmethod
    def parse(cls, label: str) -> "SlotAddress":
        """Parse a letter/number label such as ``A1`` or ``T4``."""
        i = 0
        while i < len(label) and label[i].isalpha():
            i += 1
        if i == 0 or i == len(label):
            raise AddressError(f"unparseable slot label {label!r}")
        letters, digits = label[:i].upper(), label[i:]
        if not digits.isdigit():
            raise AddressError(f"unparseable slot label {label!r}")
        return cls(column=_letters_to_column(letters), row=int(digits))


@dataclass(frozen=True)
class GridConfig:
    """Shape of the display wall. The paper-scale wall is 20x4; a single
    desktop column is 1x4. Each node owns one column of ``rows`` panels."""

    columns: int
    rows: int
    panels_per_node: int = 0  # 0 means "same as rows"

    def __post_init__(self):
        if self.columns < 1 or self.rows < 1:
            raise ArgumentError(
                f"grid must be at least 1x1, got {self.columns}x{self.rows}"
            )
        if self.panels_per_node == 0:
            object.__setattr__(self, "panels_per_node", self.rows)
        if self.panels_per_node != self.rows:
            raise ArgumentError(
                "each node drives exactly one column, so panels_per_node "
                f"must equal rows ({self.rows}), got {self.panels_per_node}"
            )

    @property
    def slot_count(self) -> int:
        return self.columns * self.rows

    def contains(self, addr: SlotAddress) -> bool:
        return 0 <= addr.column < self.columns and 1 <= addr.row <= self.rows

    def all_slots(self) -> list[SlotAddress]:
        """Every slot in column-first, top-down order."""
        return [linear_to_slot(i, self) for i in range(self.slot_count)]


def slot_to_linear(addr: SlotAddress, grid: GridConfig) -> int:
    """Linear position of a slot in column-first, top-down order.

    A1 is 0, A2 is 1, ..., then B1 follows the bottom of column A.
    """
    if not grid.contains(addr):
        raise AddressError(
            f"slot {addr.label()} outside {grid.columns}x{grid.rows} grid"
        )
    return addr.column * grid.rows + (addr.row - 1)


def linear_to_slot(index: int, grid: GridConfig) -> SlotAddress:
    """Inverse of :func:`slot_to_linear`."""
    if not 0 <= index < grid.slot_count:
        raise AddressError(
            f"linear index {index} outside {grid.columns}x{grid.rows} grid"
        )
    return SlotAddress(column=index // grid.rows, row=index % grid.rows + 1)


class RenderMode(str, Enum):
    VOLUME = "volume"
    ISOSURFACE = "isosurface"


# Fixed renderer constants (documented, not configurable).
DEFAULT_SAMPLE_STEP = 0.5
EARLY_TERMINATION_ALPHA = 0.99


@dataclass(frozen=True)
class RenderParams:
    """Shared rendering parameters applied to every loaded cube.

    ``sample_step`` is a fraction of the voxel diagonal; ``colour_map`` is a
    built-in map name or ``"file"`` for the volume's embedded table;
    ``clip_lo``/``clip_hi`` bound the normalized values that contribute
    opacity; ``iso_level`` drives the isosurface mode.
    """

    sample_step: float = DEFAULT_SAMPLE_STEP
    opacity_scale: float = 0.5
    colour_map: str = "grey"
    clip_lo: float = 0.0
    clip_hi: float = 1.0
    iso_level: float = 0.5
    mode: RenderMode = RenderMode.VOLUME

    def __post_init__(self):
        if not self.sample_step > 0:
            raise ArgumentError(f"sample_step must be > 0, got {self.sample_step}")
        if not 0.0 <= self.opacity_scale <= 1.0:
            raise ArgumentError(
                f"opacity_scale must be in [0,1], got {self.opacity_scale}"
            )
        if not (0.0 <= self.clip_lo <= self.clip_hi <= 1.0):
            raise ArgumentError(
                f"clip range must satisfy 0 <= lo <= hi <= 1, "
                f"got [{self.clip_lo}, {self.clip_hi}]"
            )
        if not 0.0 <= self.iso_level <= 1.0:
            raise ArgumentError(f"iso_level must be in [0,1], got {self.iso_level}")
        if not isinstance(self.mode, RenderMode):
            object.__setattr__(self, "mode", RenderMode(self.mode))

    def to_payload(self) -> dict[str, Any]:
        return {
            "sample_step": self.sample_step,
            "opacity_scale": self.opacity_scale,
            "colour_map": self.colour_map,
            "clip_lo": self.clip_lo,
            "clip_hi": self.clip_hi,
            "iso_level": self.iso_level,
            "mode": self.mode.value,
        }

    @classmethod
    def from_payload(cls, payload: dict[str, Any]) -> "RenderParams":
        return cls(**payload)

    def with_clip(self, lo: float, hi: float) -> "RenderParams":
        return replace(self, clip_lo=lo, clip_hi=hi)


def normalize_angle(deg: float) -> float:
    """Map any angle in degrees onto (-180, 180]."""
    a = float(deg) % 360.0
    if a > 180.0:
        a -= 360.0
    return a


@dataclass(frozen=True)
class CameraState:
    """Orthographic camera shared by all panels: orbit angles in degrees,
    zoom as a positive magnification, pan as a viewport fraction."""

    azimuth: float = 0.0
    elevation: float = 0.0
    roll: float = 0.0
    zoom: float = 1.0
    pan: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.zoom > 0:
            raise ArgumentError(f"zoom must be > 0, got {self.zoom}")
        object.__setattr__(self, "azimuth", normalize_angle(self.azimuth))
        object.__setattr__(self, "elevation", normalize_angle(self.elevation))
        object.__setattr__(self, "roll", normalize_angle(self.roll))
        object.__setattr__(self, "pan", (float(self.pan[0]), float(self.pan[1])))

    def to_payload(self) -> dict[str, Any]:
        return {
            "azimuth": self.azimuth,
            "elevation": self.elevation,
            "roll": self.roll,
            "zoom": self.zoom,
            "pan": list(self.pan),
        }

    @classmethod
    def from_payload(cls, payload: dict[str, Any]) -> "CameraState":
        data = dict(payload)
        if "pan" in data:
            data["pan"] = tuple(data["pan"])
        return cls(**data)


class Action(str, Enum):
    LOAD_DATA = "LoadData"
    UNLOAD = "Unload"
    SWAP = "Swap"
    REORDER = "Reorder"
    SELECT = "Select"
    SET_CAMERA = "SetCamera"
    SET_PARAMS = "SetParams"
    SET_CLIP = "SetClip"
    CHECKPOINT = "Checkpoint"


@dataclass(frozen=True)
class SessionEvent:
    """One uniquely identified action. ``seq`` is gap-free from 1 within a
    log; ``timestamp`` (UTC ms) is recorded but never feeds state derivation,
    so replay is deterministic."""

    seq: int
    timestamp: int
    action: Action
    payload: dict[str, Any]

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "action": self.action.value,
            "payload": self.payload,
        }

    @classmethod
    def from_json_obj(cls, obj: dict[str, Any]) -> "SessionEvent":
        return cls(
            seq=int(obj["seq"]),
            timestamp=int(obj["timestamp"]),
            action=Action(obj["action"]),
            payload=dict(obj["payload"]),
        )


@dataclass
class GridState:
    """Occupancy and shared presentation state of the wall.

    ``occupancy`` maps every slot of the grid to a cube ID or None;
    ``selection`` is presentation state and is excluded from replay hashing.
    """

    grid: GridConfig
    occupancy: dict[SlotAddress, str | None] = field(default_factory=dict)
    selection: set[SlotAddress] = field(default_factory=set)
    params: RenderParams = field(default_factory=RenderParams)
    camera: CameraState = field(default_factory=CameraState)
    sort_state: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        for slot in self.grid.all_slots():
            self.occupancy.setdefault(slot, None)

    def occupied(self) -> dict[SlotAddress, str]:
        return {s: c for s, c in self.occupancy.items() if c is not None}

    def slot_of(self, cube_id: str) -> SlotAddress | None:
        for slot, cid in self.occupancy.items():
            if cid == cube_id:
                return slot
        return None

    def copy(self) -> "GridState":
        return GridState(
            grid=self.grid,
            occupancy=dict(self.occupancy),
            selection=set(self.selection),
            params=self.params,
            camera=self.camera,
            sort_state=list(self.sort_state),
        )


def validate_state(state: GridState, grid: GridConfig) -> list[str]:
    """Check GridState invariants; violations come back as data, not errors."""
    violations: list[str] = []
    seen: dict[str, SlotAddress] = {}
    for slot, cube_id in state.occupancy.items():
        if not grid.contains(slot):
            violations.append(f"occupancy-out-of-grid: {slot.label()}")
            continue
        if cube_id is None:
            continue
        if cube_id in seen:
            violations.append(
                f"duplicate-occupancy: cube {cube_id} at "
                f"{seen[cube_id].label()} and {slot.label()}"
            )
        else:
            seen[cube_id] = slot
    for slot in state.selection:
        if not grid.contains(slot):
            violations.append(f"selection-out-of-grid: {slot.label()}")
    return violations


@dataclass(frozen=True)
class Histogram:
    """Counts of normalized voxel values over uniform bins spanning [0,1].
    The last bin includes its upper edge."""

    bin_count: int
    edges: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if self.bin_count < 1:
            raise ArgumentError(f"bin_count must be >= 1, got {self.bin_count}")
        if len(self.edges) != self.bin_count + 1:
            raise ArgumentError("edges must have bin_count + 1 entries")
        if len(self.counts) != self.bin_count:
            raise ArgumentError("counts must have bin_count entries")

    @property
    def total(self) -> int:
        return sum(self.counts)

    def to_payload(self) -> dict[str, Any]:
        return {
            "bin_count": self.bin_count,
            "edges": list(self.edges),
            "counts": list(self.counts),
        }

    @classmethod
    def from_payload(cls, payload: dict[str, Any]) -> "Histogram":
        return cls(
            bin_count=int(payload["bin_count"]),
            edges=tuple(payload["edges"]),
            counts=tuple(payload["counts"]),
        )


@dataclass(frozen=True)
class StatPoint:
    """One cross-cube query result: catalog field value x, derived scalar y."""

    cube_id: str
    x: Any
    y: float

    def to_payload(self) -> dict[str, Any]:
        return {"id": self.cube_id, "x": self.x, "y": self.y}
