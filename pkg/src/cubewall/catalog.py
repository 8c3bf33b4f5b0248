"""Survey catalog: CSV ingest, multi-criteria stable sorting, grid layout.

The catalog is immutable after ingest and sorting is a pure function, so
concurrent readers need no locking.
"""

from __future__ import annotations

import csv
import functools
import io
from dataclasses import dataclass, field

from .errors import CapacityError, IngestError, SortSpecError
from .model import GridConfig, SlotAddress, linear_to_slot

__all__ = ["CatalogEntry", "SurveyCatalog", "ingest_catalog", "sort_entries",
           "layout_order"]

ASCENDING = "ascending"
DESCENDING = "descending"


@dataclass(frozen=True)
class CatalogEntry:
    """One survey row; ``values`` holds the raw cell text per column."""

    cube_id: str
    path: str
    values: dict[str, str]


@dataclass(frozen=True)
class SurveyCatalog:
    """Ordered survey metadata. The first column is the unique cube ID, the
    second the data file path; ``numeric_columns`` lists the columns whose
    every non-empty cell parses as a number."""

    columns: tuple[str, ...]
    entries: tuple[CatalogEntry, ...]
    numeric_columns: frozenset[str] = field(default_factory=frozenset)

    @property
    def id_column(self) -> str:
        return self.columns[0]

    @property
    def path_column(self) -> str:
        return self.columns[1]

    def ids(self) -> list[str]:
        return [e.cube_id for e in self.entries]

    def get(self, cube_id: str) -> CatalogEntry:
        for e in self.entries:
            if e.cube_id == cube_id:
                return e
        raise KeyError(cube_id)

    def __contains__(self, cube_id: str) -> bool:
        return any(e.cube_id == cube_id for e in self.entries)

    def to_payload(self) -> dict:
        return {
            "columns": list(self.columns),
            "numeric_columns": sorted(self.numeric_columns),
            "entries": [
                {"id": e.cube_id, "path": e.path, "values": e.values}
                for e in self.entries
            ],
        }


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def ingest_catalog(csv_text: str) -> SurveyCatalog:
    """Parse a CSV survey list (comma separated, double-quote quoting, UTF-8,
    header row first, at least ID and path columns).

    Numeric detection is all-or-nothing per column: a column is numeric only
    when every non-empty cell parses as a number.
    """
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("empty catalog: no header row") from None
    header = [h.strip() for h in header]
    if len(header) < 2:
        raise IngestError(
            f"catalog needs at least ID and path columns, got {len(header)}"
        )
    if len(set(header)) != len(header):
        raise IngestError("duplicate column names in header")

    entries: list[CatalogEntry] = []
    seen_ids: set[str] = set()
    non_numeric: set[str] = set()
    has_value: set[str] = set()
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue  # blank line
        if len(row) != len(header):
            raise IngestError(
                f"ragged row at line {line_no}: expected {len(header)} "
                f"cells, got {len(row)}"
            )
        values = dict(zip(header, row))
        cube_id = values[header[0]].strip()
        if not cube_id:
            raise IngestError(f"empty ID at line {line_no}")
        if cube_id in seen_ids:
            raise IngestError(f"duplicate ID {cube_id}")
        seen_ids.add(cube_id)
        for col, cell in values.items():
            if cell.strip() == "":
                continue
            has_value.add(col)
            if not _is_number(cell):
                non_numeric.add(col)
        entries.append(
            CatalogEntry(cube_id=cube_id, path=values[header[1]], values=values)
        )

    numeric = frozenset(c for c in header if c in has_value and c not in non_numeric)
    return SurveyCatalog(
        columns=tuple(header), entries=tuple(entries), numeric_columns=numeric
    )


def _validate_spec(catalog: SurveyCatalog, spec: list[tuple[str, str]]) -> None:
    for fld, direction in spec:
        if fld not in catalog.columns:
            raise SortSpecError(f"unknown sort field {fld!r}")
        if direction not in (ASCENDING, DESCENDING):
            raise SortSpecError(f"unknown sort direction {direction!r}")


def _cmp_cells(a: str, b: str, numeric: bool, descending: bool) -> int:
    """Order two cells under one key. Empty cells sort last regardless of
    direction; text compares by code point, numeric by value."""
    a_empty, b_empty = a.strip() == "", b.strip() == ""
    if a_empty or b_empty:
        if a_empty and b_empty:
            return 0
        return 1 if a_empty else -1
    if numeric:
        fa, fb = float(a), float(b)
        sign = -1 if fa < fb else (1 if fa > fb else 0)
    else:
        sign = -1 if a < b else (1 if a > b else 0)
    return -sign if descending else sign


def sort_entries(catalog: SurveyCatalog, spec: list[tuple[str, str]]) -> list[str]:
    """Stable lexicographic sort over the spec's keys; returns cube IDs.

    An empty spec returns file order. Ties beyond all keys preserve file
    order (the sort is stable).
    """
    _validate_spec(catalog, spec)
    ordered = list(catalog.entries)
    # Apply keys minor-to-major; each pass is stable, so earlier spec keys
    # end up dominating.
    for fld, direction in reversed(spec):
        numeric = fld in catalog.numeric_columns
        descending = direction == DESCENDING
        ordered.sort(
            key=functools.cmp_to_key(
                lambda x, y, f=fld, n=numeric, d=descending: _cmp_cells(
                    x.values[f], y.values[f], n, d
                )
            )
        )
    return [e.cube_id for e in ordered]


def layout_order(ids: list[str], grid: GridConfig) -> dict[SlotAddress, str]:
    """Place IDs on the grid in column-first, top-down order: ids[i] goes to
    linear position i. Remaining slots stay unoccupied."""
    if len(ids) > grid.slot_count:
        overflow = len(ids) - grid.slot_count
        raise CapacityError(
            f"{len(ids)} cubes exceed the {grid.columns}x{grid.rows} grid "
            f"by {overflow}",
            overflow=overflow,
        )
    return {linear_to_slot(i, grid): cube_id for i, cube_id in enumerate(ids)}
