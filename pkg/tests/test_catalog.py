"""Catalog ingest, multi-criteria stable sorting, and grid layout."""

import functools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubewall.catalog import (
    ASCENDING,
    DESCENDING,
    ingest_catalog,
    layout_order,
    sort_entries,
)
from cubewall.errors import CapacityError, IngestError, SortSpecError
from cubewall.model import GridConfig, SlotAddress

BASIC_CSV = "id,path,dist\ng1,/d/a.xrw,3.2\ng2,/d/b.xrw,1.1\n"


class TestIngest:
    def test_direct_parse(self):
        cat = ingest_catalog(BASIC_CSV)
        assert cat.ids() == ["g1", "g2"]
        assert cat.columns == ("id", "path", "dist")
        assert "dist" in cat.numeric_columns
        assert cat.get("g1").path == "/d/a.xrw"

    def test_duplicate_id(self):
        with pytest.raises(IngestError, match="duplicate ID g1"):
            ingest_catalog("id,path\ng1,a\ng1,b\n")

    def test_ragged_row_names_line(self):
        with pytest.raises(IngestError, match="line 3"):
            ingest_catalog("id,path\ng1,a\ng2\n")

    def test_mixed_cells_fall_back_to_text(self):
        cat = ingest_catalog("id,path,dist\ng1,a,3.2\ng2,b,n/a\n")
        assert "dist" not in cat.numeric_columns

    def test_empty_cells_do_not_break_numeric_detection(self):
        cat = ingest_catalog("id,path,dist\ng1,a,3.2\ng2,b,\n")
        assert "dist" in cat.numeric_columns

    def test_needs_two_columns(self):
        with pytest.raises(IngestError):
            ingest_catalog("id\ng1\n")

    def test_empty_input(self):
        with pytest.raises(IngestError):
            ingest_catalog("")

    def test_quoted_cells(self):
        cat = ingest_catalog('id,path,name\ng1,a,"x, y"\n')
        assert cat.get("g1").values["name"] == "x, y"


SIX_ROWS = (
    "id,path,type,dist\n"
    "a,p,spiral,4.0\n"
    "b,p,dwarf,2.0\n"
    "c,p,spiral,2.0\n"
    "d,p,dwarf,\n"
    "e,p,spiral,9.5\n"
    "f,p,dwarf,2.0\n"
)


def brute_force_order(catalog, spec):
    """All-pairs comparator oracle: one comparison function over every key,
    file position as the final tiebreak."""

    def key_cmp(a, b, fld, direction):
        ca, cb = a.values[fld], b.values[fld]
        ea, eb = ca.strip() == "", cb.strip() == ""
        if ea or eb:
            return (ea > eb) - (ea < eb)
        if fld in catalog.numeric_columns:
            va, vb = float(ca), float(cb)
        else:
            va, vb = ca, cb
        sign = (va > vb) - (va < vb)
        return -sign if direction == DESCENDING else sign

    positions = {e.cube_id: i for i, e in enumerate(catalog.entries)}

    def full_cmp(a, b):
        for fld, direction in spec:
            c = key_cmp(a, b, fld, direction)
            if c:
                return c
        return positions[a.cube_id] - positions[b.cube_id]

    ordered = sorted(catalog.entries, key=functools.cmp_to_key(full_cmp))
    return [e.cube_id for e in ordered]


class TestSort:
    def test_empty_spec_is_file_order(self):
        cat = ingest_catalog(BASIC_CSV)
        assert sort_entries(cat, []) == ["g1", "g2"]

    def test_single_numeric_ascending(self):
        # The wall-load scenario: survey sorted by one mean-distance column.
        cat = ingest_catalog(BASIC_CSV)
        assert sort_entries(cat, [("dist", ASCENDING)]) == ["g2", "g1"]

    def test_two_key_spec_matches_brute_force(self):
        cat = ingest_catalog(SIX_ROWS)
        spec = [("type", ASCENDING), ("dist", DESCENDING)]
        assert sort_entries(cat, spec) == brute_force_order(cat, spec)

    def test_empty_cells_sort_last_both_directions(self):
        cat = ingest_catalog(SIX_ROWS)
        assert sort_entries(cat, [("dist", ASCENDING)])[-1] == "d"
        assert sort_entries(cat, [("dist", DESCENDING)])[-1] == "d"

    def test_unknown_field(self):
        cat = ingest_catalog(BASIC_CSV)
        with pytest.raises(SortSpecError):
            sort_entries(cat, [("nope", ASCENDING)])

    def test_text_sorts_by_code_point(self):
        cat = ingest_catalog("id,path,n\nx,p,b\ny,p,B\nz,p,a\n")
        assert sort_entries(cat, [("n", ASCENDING)]) == ["y", "z", "x"]

    @given(
        values=st.lists(
            st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=24
        ),
        directions=st.tuples(st.booleans(), st.booleans()),
    )
    def test_sort_is_stable_permutation(self, values, directions):
        rows = ["id,path,u,v"]
        rows += [f"r{i},p,{u},{v}" for i, (u, v) in enumerate(values)]
        cat = ingest_catalog("\n".join(rows) + "\n")
        spec = [
            ("u", DESCENDING if directions[0] else ASCENDING),
            ("v", DESCENDING if directions[1] else ASCENDING),
        ]
        out = sort_entries(cat, spec)
        assert sorted(out) == sorted(cat.ids())  # permutation
        assert out == brute_force_order(cat, spec)  # includes stability
        # equal-key runs preserve file order explicitly
        keyed = {e.cube_id: (e.values["u"], e.values["v"]) for e in cat.entries}
        pos = {cid: i for i, cid in enumerate(cat.ids())}
        for left, right in zip(out, out[1:]):
            if keyed[left] == keyed[right]:
                assert pos[left] < pos[right]


class TestLayout:
    def test_eight_ids_fill_two_columns(self, grid_20x4):
        ids = [f"g{i}" for i in range(8)]
        placed = layout_order(ids, grid_20x4)
        labels = {slot.label(): cid for slot, cid in placed.items()}
        assert labels == {
            "A1": "g0", "A2": "g1", "A3": "g2", "A4": "g3",
            "B1": "g4", "B2": "g5", "B3": "g6", "B4": "g7",
        }

    def test_single_id(self, grid_20x4):
        placed = layout_order(["only"], grid_20x4)
        assert placed == {SlotAddress.parse("A1"): "only"}

    def test_full_wall(self, grid_20x4):
        ids = [f"g{i}" for i in range(80)]
        placed = layout_order(ids, grid_20x4)
        assert len(placed) == 80
        assert placed[SlotAddress.parse("T4")] == "g79"

    def test_capacity_error_carries_overflow(self):
        grid = GridConfig(columns=2, rows=2)
        with pytest.raises(CapacityError) as exc:
            layout_order([f"g{i}" for i in range(7)], grid)
        assert exc.value.overflow == 3

    def test_sorted_layout_occupies_prefix(self):
        cat = ingest_catalog(SIX_ROWS)
        grid = GridConfig(columns=4, rows=2)
        ids = sort_entries(cat, [("dist", ASCENDING)])
        placed = layout_order(ids, grid)
        from cubewall.model import slot_to_linear

        linear = sorted(slot_to_linear(s, grid) for s in placed)
        assert linear == list(range(len(ids)))


def test_sort_permutation_fuzz():
    rng = random.Random(7)
    rows = ["id,path,a,b,c"]
    for i in range(40):
        rows.append(
            f"k{i},p,{rng.randint(0, 5)},{rng.choice(['x', 'y', ''])},{rng.random():.3f}"
        )
    cat = ingest_catalog("\n".join(rows) + "\n")
    for spec in (
        [("a", ASCENDING)],
        [("b", DESCENDING), ("c", ASCENDING)],
        [("a", DESCENDING), ("b", ASCENDING), ("c", DESCENDING)],
    ):
        out = sort_entries(cat, spec)
        assert sorted(out) == sorted(cat.ids())
        assert out == brute_force_order(cat, spec)
