"""Exception hierarchy shared across the package.

Every error raised on a documented contract boundary derives from
:class:`CubewallError` and carries a short machine-readable ``code`` so the
wire protocol and the HTTP API can forward failures without string matching.
"""

from __future__ import annotations


class CubewallError(Exception):
    """Base class; ``code`` is the machine-readable identifier."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class AddressError(CubewallError):
    """Slot address outside the configured grid."""

    code = "bad-address"


class CapacityError(CubewallError):
    """More cubes than the grid has slots; carries the overflow count."""

    code = "over-capacity"

    def __init__(self, message: str, overflow: int):
        super().__init__(message)
        self.overflow = overflow


class IngestError(CubewallError):
    """Malformed survey catalog input."""

    code = "ingest-failed"


class SortSpecError(CubewallError):
    """Sort specification names a field the catalog does not have."""

    code = "bad-sort-spec"


class FormatError(CubewallError):
    """Corrupt or truncated volume file; ``offset`` locates the failure."""

    code = "bad-format"

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class DataError(CubewallError):
    """Volume content unusable (e.g. no finite voxels)."""

    code = "bad-data"


class ArgumentError(CubewallError):
    """Invalid argument to an operation (zero bins, zero viewport, ...)."""

    code = "bad-argument"


class NoDataError(CubewallError):
    """Query against a panel with no cube loaded."""

    code = "no-data"


class TransitionError(CubewallError):
    """Event rejected against the current grid state; never logged."""

    code = "bad-transition"


class SessionError(CubewallError):
    """Session file unreadable: version mismatch or broken seq chain."""

    code = "bad-session"


class FramingError(CubewallError):
    """Unparseable wire line; the connection should be reset."""

    code = "bad-framing"


class ProtocolMismatchError(CubewallError):
    """Well-formed wire message of an unknown kind."""

    code = "protocol-mismatch"

    def __init__(self, message: str, msg_id: int | None = None):
        super().__init__(message)
        self.msg_id = msg_id


class NodeUnavailableError(CubewallError):
    """A render node did not answer within the timeout."""

    code = "node-unavailable"


class ConfigError(CubewallError):
    """Unusable launch configuration."""

    code = "bad-config"
