import json
import os

import pytest

from qloss import cli


def run(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = cli.main([*args, "--out", str(out)])
    return code, out


def test_parse_grid():
    assert cli.parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert cli.parse_grid("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    for bad in ("0:1", "1:0:0.1", "0:1:0", "a:b:c"):
        with pytest.raises(cli.UsageError):
            cli.parse_grid(bad)


def test_fmt():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert cli.fmt(None) == "" and cli.fmt(True) == "true" and cli.fmt(3) == "3"
    assert cli.fmt([0.5, 1]) == "0.5;1"


def test_precedence(tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("# comment\nseed = 5\nn-states = 17\n")
    conf = cli.read_config(str(cfg))
    s = cli.resolve("teleport-box", {"seed": 9}, conf, {"QLOSS_SEED": "3"})
    assert s["seed"] == 9 and s["n_states"] == 17
    s = cli.resolve("teleport-box", {}, conf, {"QLOSS_SEED": "3"})
    assert s["seed"] == 5
    s = cli.resolve("teleport-box", {}, {}, {"QLOSS_SEED": "3"})
    assert s["seed"] == 3
    assert cli.resolve("teleport-box", {}, {}, {})["seed"] == 0
    cfg.write_text("bogus = 1\n")
    with pytest.raises(cli.UsageError):
        cli.read_config(str(cfg))


def test_oracle_check_exit_codes(tmp_path):
    code, out = run(tmp_path, "oracle-check")
    assert code == 0
    summary = json.loads((out / "oracle-check-summary.json").read_text())
    assert summary["results"]["passed"]
    code, _ = run(tmp_path, "oracle-check", "--corrupt", "lossy_phi_p", name="bad")
    assert code == 1


def test_usage_and_io_errors(tmp_path):
    assert cli.main(["no-such-command"]) == 2
    assert cli.main(["capacity", "--grid", "0:2:0.5", "--out", str(tmp_path / "x")]) == 2
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.main(["oracle-check", "--out", str(blocker / "sub")]) == 2
    assert cli.main(["teleport-box", "--config", str(tmp_path / "missing.txt"), "--out", str(tmp_path / "y")]) == 2


def test_teleport_box_lossless_single_state(tmp_path):
    code, out = run(tmp_path, "teleport-box", "--t-a", "1", "--t-b", "1", "--n-states", "1", "--schemes", "baseline")
    assert code == 0
    lines = (out / "teleport-box.csv").read_bytes().split(b"\n")
    assert lines[0] == b"scheme,state_index,fidelity"
    assert len([l for l in lines[1:] if l]) == 1
    assert float(lines[1].split(b",")[2]) == pytest.approx(1.0)
    assert b"\r" not in (out / "teleport-box.csv").read_bytes()


def test_manifest_replay_is_byte_identical(tmp_path):
    code, out = run(tmp_path, "teleport-sweep", "--grid", "0.2:1:0.4", "--schemes", "baseline,gains",
                    "--n-states", "20", "--restarts", "3", "--jobs", "1")
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["grid"] == [0.2, 0.6, 1.0]
    assert set(manifest["outputs"]) == {"teleport-sweep.csv", "teleport-sweep-summary.json"}
    out2 = tmp_path / "again"
    assert cli.main(["replay", str(out / "manifest.json"), "--out", str(out2), "--jobs", "2"]) == 0
    for name in manifest["outputs"]:
        assert (out / name).read_bytes() == (out2 / name).read_bytes()


def test_seed_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("QLOSS_SEED", "42")
    code, out = run(tmp_path, "capacity", "--grid", "0.5:0.5:0.1", "--restarts", "2")
    assert code == 0
    assert json.loads((out / "manifest.json").read_text())["seed"] == 42


def test_capacity_endpoints(tmp_path):
    code, out = run(tmp_path, "capacity", "--grid", "0:1:1", "--restarts", "4")
    assert code == 0
    rows = (out / "capacity.csv").read_text().splitlines()[1:]
    assert float(rows[0].split(",")[1]) == pytest.approx(0.0, abs=1e-9)
    assert float(rows[1].split(",")[1]) == pytest.approx(1.0, abs=1e-6)


def test_crossing():
    assert cli.crossing([0.1, 0.2, 0.3], [-1.0, -0.5, 0.5]) == pytest.approx(0.25, abs=1e-6)
    assert cli.crossing([0.1, 0.2], [-1.0, -0.5]) is None
