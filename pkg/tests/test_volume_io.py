"""XRW and raw-float formats: byte layout, round trips, corruption."""

import gzip
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubewall.errors import ArgumentError, FormatError
from cubewall.volume import (
    ValueDomain,
    Volume,
    normalize,
    quantize_bytes,
    read_rawfloat,
    read_volume_file,
    read_xrw,
    write_rawfloat,
    write_xrw,
)

from .conftest import make_volume


def random_byte_volume(rng: np.random.Generator, max_dim: int = 16) -> Volume:
    nx, ny, nz = (int(rng.integers(1, max_dim + 1)) for _ in range(3))
    data = rng.integers(0, 256, size=(nz, ny, nx), dtype=np.uint8)
    table = rng.integers(0, 256, size=(256, 3), dtype=np.uint8)
    return Volume(
        nx=nx, ny=ny, nz=nz,
        wx=float(rng.uniform(0.1, 4.0)), wy=float(rng.uniform(0.1, 4.0)),
        wz=float(rng.uniform(0.1, 4.0)),
        data=data, colour_table=table, value_domain=ValueDomain.RAW_BYTES,
    )


class TestXrw:
    def test_round_trip_small(self):
        rng = np.random.default_rng(1)
        vol = random_byte_volume(rng)
        blob = write_xrw(vol)
        back = read_xrw(blob)
        assert np.array_equal(back.data, vol.data)
        assert np.array_equal(back.colour_table, vol.colour_table)
        assert (back.nx, back.ny, back.nz) == (vol.nx, vol.ny, vol.nz)
        assert back.wx == pytest.approx(vol.wx, rel=1e-6)
        assert write_xrw(back) == blob  # bit-exact

    def test_hand_built_single_voxel(self):
        # Independent byte layout: header, one voxel byte 255, grey ramp.
        header = struct.pack("<3i3f", 1, 1, 1, 1.0, 1.0, 1.0)
        table = bytes(bytearray(v for i in range(256) for v in (i, i, i)))
        payload = header + bytes([255]) + table
        vol = read_xrw(gzip.compress(payload))
        assert vol.data.shape == (1, 1, 1)
        assert int(vol.data[0, 0, 0]) == 255
        assert vol.value_domain is ValueDomain.RAW_BYTES
        assert normalize(vol).data[0, 0, 0] == pytest.approx(1.0)

    def test_zero_dimension_rejected(self):
        payload = struct.pack("<3i3f", 0, 2, 2, 1.0, 1.0, 1.0) + b"x" * (4 + 768)
        with pytest.raises(FormatError, match="non-positive"):
            read_xrw(gzip.compress(payload))

    def test_truncated_stream_reports_offset(self):
        vol = random_byte_volume(np.random.default_rng(2))
        raw = gzip.decompress(write_xrw(vol))
        with pytest.raises(FormatError) as exc:
            read_xrw(gzip.compress(raw[:-10]))
        assert exc.value.offset == len(raw) - 10

    def test_trailing_garbage_rejected(self):
        vol = random_byte_volume(np.random.default_rng(3))
        raw = gzip.decompress(write_xrw(vol))
        with pytest.raises(FormatError, match="trailing"):
            read_xrw(gzip.compress(raw + b"!"))

    def test_not_gzip(self):
        with pytest.raises(FormatError, match="gzip"):
            read_xrw(b"this is not compressed")

    def test_normalized_write_quantizes_half_away(self):
        vol = make_volume(np.full((1, 1, 2), 0.5))
        raw = gzip.decompress(write_xrw(vol))
        voxels = raw[24:26]
        assert voxels == bytes([128, 128])  # 0.5*255 = 127.5 rounds away to 128

    def test_constant_volume_all_bytes_equal(self):
        vol = make_volume(np.full((2, 2, 2), 0.3))
        raw = gzip.decompress(write_xrw(vol))
        voxels = set(raw[24 : 24 + 8])
        assert len(voxels) == 1

    def test_raw_float_volume_rejected(self):
        vol = make_volume(np.zeros((1, 1, 1)), domain=ValueDomain.RAW_FLOAT)
        with pytest.raises(ArgumentError):
            write_xrw(vol)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**31))
    def test_round_trip_property(self, seed):
        vol = random_byte_volume(np.random.default_rng(seed))
        blob = write_xrw(vol)
        assert write_xrw(read_xrw(blob)) == blob


class TestRawFloat:
    def test_nan_flagged(self):
        blob = struct.pack("<3i3f", 2, 1, 1, 1.0, 1.0, 1.0) + struct.pack(
            "<2f", 1.0, float("nan")
        )
        vol = read_rawfloat(blob)
        assert vol.nan_mask is not None
        assert vol.finite_count == 1
        assert vol.finite_values().tolist() == [1.0]

    def test_round_trip(self):
        rng = np.random.default_rng(4)
        data = rng.normal(size=(3, 2, 5))
        data[0, 0, 0] = np.nan
        vol = make_volume(
            data.astype(np.float32).astype(np.float64),
            domain=ValueDomain.RAW_FLOAT,
            nan_mask=np.isnan(data),
        )
        blob = write_rawfloat(vol)
        back = read_rawfloat(blob)
        assert back.finite_count == vol.voxel_count - 1
        assert np.allclose(
            back.finite_values(), vol.finite_values(), rtol=0, atol=0
        )
        assert write_rawfloat(back) == blob

    def test_generated_blob_dims_preserved(self, tmp_path):
        from cubewall.synthetic import write_synthetic

        write_synthetic("gaussian", (64, 64, 64), tmp_path / "g.raw", seed=5)
        vol = read_volume_file(tmp_path / "g.raw")
        assert (vol.nx, vol.ny, vol.nz) == (64, 64, 64)
        assert vol.voxel_count == 64**3

    def test_truncation(self):
        blob = struct.pack("<3i3f", 2, 2, 2, 1.0, 1.0, 1.0) + b"\0" * 8
        with pytest.raises(FormatError, match="truncated"):
            read_rawfloat(blob)

    def test_unknown_extension(self, tmp_path):
        p = tmp_path / "vol.fits"
        p.write_bytes(b"")
        with pytest.raises(FormatError, match="extension"):
            read_volume_file(p)


class TestQuantize:
    def test_round_half_away(self):
        values = np.array([0.0, 0.5, 1.0, 127.5 / 255.0, 0.999])
        assert quantize_bytes(values).tolist() == [0, 128, 255, 128, 255]

    def test_clips_out_of_range(self):
        assert quantize_bytes(np.array([-0.5, 1.5])).tolist() == [0, 255]
