import json
from pathlib import Path

import pytest

from liouvol.cli import main


def run_cli(*args):
    return main(list(args))


def test_verify_identity_circle(tmp_path):
    code = run_cli("verify-identity", "--curve", "circle",
                   "--out", str(tmp_path),
                   "--eps-schedule", "0.1", "0.05", "0.025", "0.0125",
                   "--grid", "16x6x128", "--series-order", "64")
    assert code == 0
    payload = json.loads((tmp_path / "verify_identity.json").read_text())
    assert payload["passed"] is True
    assert abs(payload["identity_residual"]) < 1e-6
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert "verify_identity.json" in manifest["outputs"]


def test_action_subcommand_and_trace(tmp_path):
    code = run_cli("action", "--curve", "cubic", "--out", str(tmp_path),
                   "--grid", "16x6x128", "--series-order", "64", "--trace")
    assert code == 0
    payload = json.loads((tmp_path / "action.json").read_text())
    assert payload["total"] > 0
    assert (tmp_path / "action_trace.csv").exists()


def test_grunsky_subcommand(tmp_path):
    code = run_cli("grunsky", "--curve", "cubic", "--out", str(tmp_path),
                   "--grid", "16x6x128", "--series-order", "64")
    assert code == 0
    payload = json.loads((tmp_path / "grunsky.json").read_text())
    assert payload["lhs"] <= payload["rhs"] + 1e-9


def test_surface_subcommand(tmp_path):
    code = run_cli("surface", "--curve", "cubic", "--out", str(tmp_path),
                   "--mesh", "16x32", "--series-order", "64")
    assert code == 0
    for name in ("surface_in.obj", "surface_out.obj", "surface_in.csv",
                 "surface_out.csv", "surface.json"):
        assert (tmp_path / name).exists()
    payload = json.loads((tmp_path / "surface.json").read_text())
    assert payload["separation"] >= 0


def test_flow_subcommand(tmp_path):
    code = run_cli("flow", "--curve", "wobble", "--out", str(tmp_path),
                   "--steps", "5", "--grid", "16x6x128",
                   "--series-order", "64")
    assert code == 0
    payload = json.loads((tmp_path / "flow.json").read_text())
    assert payload["monotone"] is True
    lines = (tmp_path / "flow.csv").read_text().strip().split("\n")
    assert lines[0].startswith("step,action")
    assert len(lines) >= 2


def test_verify_identity_contract_failure_exits_2(tmp_path):
    # an inadequate quadrature cannot meet the identity tolerance
    code = run_cli("verify-identity", "--curve", "ellipse",
                   "--out", str(tmp_path), "--grid", "2x2x32",
                   "--series-order", "64")
    assert code == 2
    diag = json.loads((tmp_path / "diagnostic.json").read_text())
    assert diag["error"] == "ContractError"
    payload = json.loads((tmp_path / "verify_identity.json").read_text())
    assert payload["passed"] is False


def test_volume_dump_obj_writes_clipped_sheets_and_cap(tmp_path):
    code = run_cli("volume", "--curve", "cubic", "--out", str(tmp_path),
                   "--grid", "12x5x128", "--series-order", "64",
                   "--dump-obj")
    assert code == 0
    for name in ("volume_in_clipped.obj", "volume_out_clipped.obj",
                 "volume_cap.obj"):
        assert (tmp_path / name).exists()
        assert name in json.loads(
            (tmp_path / "manifest.json").read_text())["outputs"]


def test_missing_curve_file_is_input_error(tmp_path):
    code = run_cli("action", "--curve", str(tmp_path / "nope.json"),
                   "--out", str(tmp_path))
    assert code == 1


def test_malformed_curve_json_is_input_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code = run_cli("action", "--curve", str(bad), "--out", str(tmp_path))
    assert code == 1


def test_bad_grid_spec_is_input_error(tmp_path):
    code = run_cli("action", "--curve", "circle", "--out", str(tmp_path),
                   "--grid", "banana")
    assert code == 1


def test_determinism_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        code = run_cli("action", "--curve", "cubic", "--out", str(out),
                       "--grid", "16x6x128", "--series-order", "64",
                       "--seed", "11")
        assert code == 0
    for name in ("action.json", "manifest.json"):
        b1 = (out1 / name).read_bytes()
        b2 = (out2 / name).read_bytes()
        assert b1 == b2
    m1 = json.loads((out1 / "manifest.json").read_text())
    m2 = json.loads((out2 / "manifest.json").read_text())
    assert m1["outputs"] == m2["outputs"]
    assert m1["config_hash"] == m2["config_hash"]


def test_manifest_lists_all_outputs(tmp_path):
    code = run_cli("volume", "--curve", "circle", "--out", str(tmp_path),
                   "--eps-schedule", "0.1", "0.05", "0.025",
                   "--grid", "16x6x128", "--series-order", "64")
    assert code == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    written = {p.name for p in tmp_path.iterdir()} - {"manifest.json"}
    assert set(manifest["outputs"]) == written
    for name, digest in manifest["outputs"].items():
        import hashlib
        assert hashlib.sha256(
            (tmp_path / name).read_bytes()).hexdigest() == digest
