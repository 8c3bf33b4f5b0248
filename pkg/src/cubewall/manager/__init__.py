"""Manager: event-sourced global state, FIFO scheduling, node fan-out,
session persistence and replay."""

from .nodeclient import NodeClient
from .service import ManagerCore, ManagerService, fan_out
from .session import SessionLog, load_session, replay, save_session
from .state import GlobalState, apply_event, apply_reorder, fold_events, state_hash

__all__ = [
    "GlobalState",
    "ManagerCore",
    "ManagerService",
    "NodeClient",
    "SessionLog",
    "apply_event",
    "apply_reorder",
    "fan_out",
    "fold_events",
    "load_session",
    "replay",
    "save_session",
    "state_hash",
]
