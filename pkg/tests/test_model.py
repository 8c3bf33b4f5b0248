"""Core model: slot addressing, grid state invariants, parameter ranges."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubewall.errors import AddressError, ArgumentError
from cubewall.model import (
    CameraState,
    GridConfig,
    GridState,
    Histogram,
    RenderParams,
    SlotAddress,
    linear_to_slot,
    normalize_angle,
    slot_to_linear,
    validate_state,
)


class TestSlotAddressing:
    def test_origin_is_linear_zero(self, grid_20x4):
        assert slot_to_linear(SlotAddress.parse("A1"), grid_20x4) == 0

    def test_column_major_order(self, grid_20x4):
        # A1..A4 fill first, then B1 follows.
        assert slot_to_linear(SlotAddress.parse("B1"), grid_20x4) == 4

    def test_last_slot(self, grid_20x4):
        assert slot_to_linear(SlotAddress.parse("T4"), grid_20x4) == 19 * 4 + 3

    def test_out_of_range_address(self, grid_20x4):
        with pytest.raises(AddressError):
            slot_to_linear(SlotAddress.parse("U1"), grid_20x4)
        with pytest.raises(AddressError):
            slot_to_linear(SlotAddress(column=0, row=5), grid_20x4)

    def test_label_round_trip(self):
        for label in ("A1", "T4", "Z9", "AA1", "AF3"):
            assert SlotAddress.parse(label).label() == label

    def test_bad_labels(self):
        for label in ("", "11", "A", "A0X", "1A"):
            with pytest.raises(AddressError):
                SlotAddress.parse(label)

    @given(
        columns=st.integers(1, 32),
        rows=st.integers(1, 32),
        data=st.data(),
    )
    def test_linear_round_trip(self, columns, rows, data):
        grid = GridConfig(columns=columns, rows=rows)
        index = data.draw(st.integers(0, grid.slot_count - 1))
        addr = linear_to_slot(index, grid)
        assert slot_to_linear(addr, grid) == index
        assert SlotAddress.parse(addr.label()) == addr

    def test_all_slots_is_linear_enumeration(self):
        grid = GridConfig(columns=3, rows=2)
        labels = [s.label() for s in grid.all_slots()]
        assert labels == ["A1", "A2", "B1", "B2", "C1", "C2"]


class TestValidateState:
    def test_empty_grid_is_clean(self, grid_20x4):
        assert validate_state(GridState(grid=grid_20x4), grid_20x4) == []

    def test_duplicate_occupancy(self, grid_20x4):
        state = GridState(grid=grid_20x4)
        state.occupancy[SlotAddress.parse("A1")] = "7"
        state.occupancy[SlotAddress.parse("B2")] = "7"
        violations = validate_state(state, grid_20x4)
        assert len(violations) == 1
        assert "duplicate-occupancy" in violations[0]
        assert "7" in violations[0]

    def test_selection_outside_grid(self, grid_20x4):
        state = GridState(grid=grid_20x4)
        state.selection.add(SlotAddress.parse("U1"))
        violations = validate_state(state, grid_20x4)
        assert violations == ["selection-out-of-grid: U1"]


class TestParams:
    def test_defaults_valid(self):
        RenderParams()
        CameraState()

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"sample_step": 0.0},
            {"opacity_scale": 1.5},
            {"opacity_scale": -0.1},
            {"clip_lo": 0.8, "clip_hi": 0.2},
            {"clip_hi": 1.4},
            {"iso_level": -0.2},
        ],
    )
    def test_bad_params_rejected(self, kwargs):
        with pytest.raises(ArgumentError):
            RenderParams(**kwargs)

    def test_zoom_must_be_positive(self):
        with pytest.raises(ArgumentError):
            CameraState(zoom=0.0)

    def test_angles_normalized(self):
        cam = CameraState(azimuth=370, elevation=-190, roll=180)
        assert cam.azimuth == pytest.approx(10.0)
        assert cam.elevation == pytest.approx(170.0)
        assert cam.roll == 180.0  # (-180, 180]: 180 stays

    @given(st.floats(-1e6, 1e6))
    def test_normalize_angle_range(self, deg):
        a = normalize_angle(deg)
        assert -180.0 < a <= 180.0

    def test_params_payload_round_trip(self):
        p = RenderParams(sample_step=0.25, opacity_scale=0.9, colour_map="heat",
                         clip_lo=0.1, clip_hi=0.7, iso_level=0.4, mode="isosurface")
        assert RenderParams.from_payload(p.to_payload()) == p

    def test_camera_payload_round_trip(self):
        c = CameraState(azimuth=45, elevation=-30, roll=5, zoom=2.0, pan=(0.1, -0.2))
        assert CameraState.from_payload(c.to_payload()) == c


class TestHistogramType:
    def test_shape_validation(self):
        with pytest.raises(ArgumentError):
            Histogram(bin_count=2, edges=(0.0, 1.0), counts=(1, 2))
        with pytest.raises(ArgumentError):
            Histogram(bin_count=0, edges=(0.0,), counts=())

    def test_total(self):
        h = Histogram(bin_count=2, edges=(0.0, 0.5, 1.0), counts=(3, 4))
        assert h.total == 7


class TestGridConfig:
    def test_rejects_degenerate(self):
        with pytest.raises(ArgumentError):
            GridConfig(columns=0, rows=4)

    def test_panels_per_node_defaults_to_rows(self):
        assert GridConfig(columns=2, rows=4).panels_per_node == 4

    def test_panels_per_node_must_match_rows(self):
        with pytest.raises(ArgumentError):
            GridConfig(columns=2, rows=4, panels_per_node=2)
