"""CLI subcommands: gen, batch, config handling, exit codes."""

import json
import random

import pytest

from cubewall.cli import EXIT_CONFIG, main
from cubewall.config import load_config, parse_viewport
from cubewall.errors import ConfigError
from cubewall.manager.session import SessionLog, save_session
from cubewall.model import Action, GridConfig
from cubewall.synthetic import make_field
from cubewall.volume import read_volume_file

from .event_gen import generate_session


class TestGen:
    def test_sphere_file_loads(self, tmp_path, capsys):
        out = tmp_path / "s.xrw"
        assert main(["gen", "--kind", "sphere", "--dims", "32",
                     "--out", str(out)]) == 0
        fragment = capsys.readouterr().out.strip()
        assert fragment.startswith("s,s.xrw,sphere,32,0,")
        vol = read_volume_file(out)
        assert (vol.nx, vol.ny, vol.nz) == (32, 32, 32)

    def test_seeded_noise_is_reproducible(self, tmp_path):
        a, b = tmp_path / "a.raw", tmp_path / "b.raw"
        main(["gen", "--kind", "noise", "--seed", "1", "--out", str(a)])
        main(["gen", "--kind", "noise", "--seed", "1", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()
        c = tmp_path / "c.raw"
        main(["gen", "--kind", "noise", "--seed", "2", "--out", str(c)])
        assert a.read_bytes() != c.read_bytes()

    def test_zero_dims_is_config_error(self, tmp_path, capsys):
        code = main(["gen", "--kind", "noise", "--dims", "0",
                     "--out", str(tmp_path / "x.raw")])
        assert code == EXIT_CONFIG

    def test_oversized_dims_rejected(self, tmp_path):
        code = main(["gen", "--kind", "noise", "--dims", "600",
                     "--out", str(tmp_path / "x.raw")])
        assert code != 0

    def test_field_kinds_are_distinct(self):
        fields = {k: make_field(k, (8, 8, 8), seed=3) for k in
                  ("sphere", "gaussian", "shells", "noise")}
        keys = list(fields)
        for i, a in enumerate(keys):
            for b in keys[i + 1:]:
                assert not (fields[a] == fields[b]).all()


class TestConfig:
    def test_viewport_parse(self):
        assert parse_viewport("342x768") == (342, 768)
        with pytest.raises(ConfigError):
            parse_viewport("bogus")
        with pytest.raises(ConfigError):
            parse_viewport("0x10")

    def test_config_round_trip(self, tmp_path):
        cfg_obj = {
            "grid": {"columns": 2, "rows": 4},
            "nodes": [{"column": 0, "host": "127.0.0.1",
                       "control_port": 1234, "http_port": 1235}],
            "data_root": "data",
            "catalog": "data/catalog.csv",
            "viewport": {"width": 64, "height": 48},
            "manager_port": 0,
        }
        path = tmp_path / "config.json"
        path.write_text(json.dumps(cfg_obj))
        cfg = load_config(path)
        assert cfg.grid.columns == 2
        assert cfg.data_root == tmp_path / "data"
        assert cfg.viewport == (64, 48)

    def test_duplicate_node_columns_rejected(self, tmp_path):
        cfg_obj = {
            "grid": {"columns": 2, "rows": 4},
            "nodes": [
                {"column": 0, "control_port": 1, "http_port": 2},
                {"column": 0, "control_port": 3, "http_port": 4},
            ],
            "catalog": "c.csv",
        }
        path = tmp_path / "config.json"
        path.write_text(json.dumps(cfg_obj))
        with pytest.raises(ConfigError, match="duplicate"):
            load_config(path)

    def test_missing_config_file(self):
        with pytest.raises(ConfigError):
            load_config("/nonexistent/config.json")

    def test_local_requires_catalog(self, tmp_path):
        code = main(["local", "--catalog", str(tmp_path / "missing.csv")])
        assert code == EXIT_CONFIG


def write_system_config(tmp_path, data, grid, viewport=(32, 24)):
    cfg = {
        "grid": {"columns": grid.columns, "rows": grid.rows},
        "nodes": [],
        "data_root": str(data),
        "catalog": str(data / "catalog.csv"),
        "viewport": {"width": viewport[0], "height": viewport[1]},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


class TestBatch:
    @pytest.fixture
    def session_setup(self, tmp_path, survey_dir):
        grid = GridConfig(columns=2, rows=2)
        log = SessionLog()
        log.append(Action.LOAD_DATA, {"assignments": [
            {"slot": "A1", "id": "c0", "path": "c0.raw"},
            {"slot": "A2", "id": "c1", "path": "c1.raw"},
            {"slot": "B1", "id": "c2", "path": "c2.raw"},
        ]})
        log.append(Action.SET_CAMERA, {"azimuth": 40, "elevation": 10,
                                       "roll": 0, "zoom": 1.2, "pan": [0, 0]})
        log.append(Action.SWAP, {"a": "A1", "b": "B1"})
        session_path = tmp_path / "session.jsonl"
        session_path.write_bytes(save_session(log, grid))
        config_path = write_system_config(tmp_path, survey_dir, grid)
        return config_path, session_path

    def test_batch_writes_frames_and_hash(self, tmp_path, session_setup):
        config_path, session_path = session_setup
        out = tmp_path / "out"
        code = main(["batch", "--config", str(config_path),
                     "--session", str(session_path), "--out", str(out)])
        assert code == 0
        pngs = sorted(p.name for p in out.glob("*.png"))
        assert pngs == ["A1.png", "A2.png", "B1.png", "B2.png"]
        state_hash = (out / "state_hash.txt").read_text().strip()
        assert len(state_hash) == 64
        manifest = json.loads((out / "frames.json").read_text())
        assert set(manifest) == {"A1", "A2", "B1", "B2"}

    def test_batch_is_deterministic(self, tmp_path, session_setup):
        config_path, session_path = session_setup
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        for out in (out1, out2):
            assert main(["batch", "--config", str(config_path),
                         "--session", str(session_path), "--out", str(out)]) == 0
        for name in ("A1.png", "B2.png", "state_hash.txt", "frames.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_batch_empty_session(self, tmp_path, survey_dir):
        grid = GridConfig(columns=1, rows=2)
        session_path = tmp_path / "empty.jsonl"
        session_path.write_bytes(save_session(SessionLog(), grid))
        config_path = write_system_config(tmp_path, survey_dir, grid)
        out = tmp_path / "out"
        assert main(["batch", "--config", str(config_path),
                     "--session", str(session_path), "--out", str(out)]) == 0
        from cubewall.manager.state import GlobalState, state_hash

        expected = state_hash(GlobalState.empty(grid))
        assert (out / "state_hash.txt").read_text().strip() == expected

    def test_batch_grid_mismatch(self, tmp_path, survey_dir):
        session_path = tmp_path / "s.jsonl"
        session_path.write_bytes(save_session(SessionLog(),
                                              GridConfig(columns=3, rows=1)))
        config_path = write_system_config(tmp_path, survey_dir,
                                          GridConfig(columns=1, rows=2))
        code = main(["batch", "--config", str(config_path),
                     "--session", str(session_path), "--out", str(tmp_path / "o")])
        assert code == EXIT_CONFIG

    def test_batch_upto_checkpoint(self, tmp_path, survey_dir):
        grid = GridConfig(columns=1, rows=2)
        log = SessionLog()
        log.append(Action.LOAD_DATA, {"assignments": [
            {"slot": "A1", "id": "c0", "path": "c0.raw"}]})
        log.append(Action.CHECKPOINT, {"name": "before-clear"})
        log.append(Action.UNLOAD, {"slots": ["A1"]})
        session_path = tmp_path / "s.jsonl"
        session_path.write_bytes(save_session(log, grid))
        config_path = write_system_config(tmp_path, survey_dir, grid)
        out = tmp_path / "o"
        assert main(["batch", "--config", str(config_path),
                     "--session", str(session_path), "--out", str(out),
                     "--upto", "before-clear"]) == 0
        manifest = json.loads((out / "frames.json").read_text())
        # A1 occupied at the checkpoint: its frame differs from empty A2
        assert manifest["A1"] != manifest["A2"]


def test_generated_session_is_batchable(tmp_path, survey_dir):
    # sessions from the fuzz generator replay through the real CLI
    grid = GridConfig(columns=2, rows=2)
    rng = random.Random(12)
    events = generate_session(rng, grid, 30)
    log = SessionLog()
    for ev in events:
        # remap generated ids onto real files
        if ev.action is Action.LOAD_DATA:
            for a in ev.payload["assignments"]:
                idx = sum(a["id"].encode()) % 4
                a["id"] = f"pool{idx}-{a['id']}"
                a["path"] = f"c{idx}.raw"
        log.events.append(ev)
    session_path = tmp_path / "fuzz.jsonl"
    session_path.write_bytes(save_session(log, grid))
    config_path = write_system_config(tmp_path, survey_dir, grid)
    out = tmp_path / "out"
    assert main(["batch", "--config", str(config_path),
                 "--session", str(session_path), "--out", str(out)]) == 0
