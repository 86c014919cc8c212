import json
import math
import subprocess
import sys

import pytest

from parafermions.cli import RunConfig, UsageError, dumps, main, report_aggregate, run


def _run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_dumps_is_canonical():
    assert dumps({"b": 1.0, "a": [0.1, 2]}) == '{"a": [0.10000000000000001, 2], "b": 1.0}\n'


def test_solve_dense(capsys):
    code, out = _run(capsys, "solve", "--model", "dense", "--gamma", "0.7", "--alpha", "1.1")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert doc["spin"] == pytest.approx(1 - 2 * 0.7 / math.pi)
    assert any(abs(r - doc["spin"]) < 1e-9 for r in doc["spin_roots"])
    assert doc["config"]["gamma"] == 0.7


def test_solve_printed_on_fails(capsys):
    code, out = _run(capsys, "solve", "--model", "dilute", "--eta", "0.9", "--alpha", "1.1", "--printed")
    assert code == 1 and json.loads(out)["failures"]


def test_det_scan_c2_degenerate(capsys):
    code, out = _run(capsys, "det-scan", "--model", "c2", "--eta", str(math.pi / 3), "--alpha", "1.0")
    doc = json.loads(out)
    assert code == 0
    assert doc["method"] == "singular-value"
    assert any(abs(r) < 1e-6 for r in doc["spin_roots"])


def test_det_scan_csv(capsys):
    code, out = _run(capsys, "det-scan", "--model", "dense", "--gamma", "0.7", "--alpha", "1.1", "--format", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("# config: ")
    assert lines[1] == "s,det"
    assert len(lines) == 2 + 2001


def test_det_scan_coarse_grid_reports_missed_root(capsys):
    code, out = _run(capsys, "det-scan", "--model", "dense", "--gamma", "0.7", "--alpha", "1.1", "--steps", "10")
    assert code == 1
    assert "not among" in json.loads(out)["failures"][0]


def test_negative_s_range_is_accepted(capsys):
    code, out = _run(capsys, "det-scan", "--model", "dense", "--gamma", "0.7", "--alpha", "1.1", "--s-range", "-1,0", "--steps", "50")
    assert code in (0, 1)
    assert json.loads(out)["config"]["s_range"] == [-1.0, 0.0]


@pytest.mark.parametrize(
    "argv",
    [
        ("holo-verify", "--model", "dense", "--gamma", "0.7", "--alpha", "1.0"),
        ("holo-verify", "--model", "dilute", "--eta", "0.9", "--alpha", "1.1"),
        ("holo-verify", "--model", "c2", "--eta", "0.8", "--alpha", "1.1", "--tol", "1e-10"),
    ],
)
def test_holo_verify_passes(capsys, argv):
    code, out = _run(capsys, *argv)
    doc = json.loads(out)
    assert code == 0, doc["failures"]
    assert doc["interior_max"] < 1e-10


def test_holo_verify_perturbed_fails(capsys):
    code, out = _run(capsys, "holo-verify", "--model", "dense", "--gamma", "0.7", "--alpha", "1.0", "--perturb", "0.01", "--seed", "1")
    assert code == 1
    assert json.loads(out)["interior_max"] > 1e-4


def test_holo_verify_degrees(capsys):
    code, out = _run(capsys, "holo-verify", "--model", "dense", "--gamma", "40", "--alpha", "60", "--degrees")
    doc = json.loads(out)
    assert code == 0
    assert doc["config"]["alpha"] == pytest.approx(math.pi / 3)


def test_ybe_verify_dense(capsys):
    code, out = _run(capsys, "ybe-verify", "--model", "dense", "--gamma", "0.7", "--psi1", "0.3", "--psi2", "1.1")
    doc = json.loads(out)
    assert code == 0 and doc["tl_residual"] < 1e-12


@pytest.mark.parametrize("model", ["dilute", "c2"])
def test_ybe_verify_families(capsys, model):
    code, out = _run(capsys, "ybe-verify", "--model", model, "--eta", "0.9", "--psi1", "0.4", "--psi2", "-1.2")
    doc = json.loads(out)
    assert code == 0
    assert "sum/complement" in doc["passing_conventions"]
    assert all({"pattern", "lhs", "rhs", "diff"} <= set(c) for c in doc["classes"])


def test_ybe_verify_unknown_convention(capsys):
    code, _ = _run(capsys, "ybe-verify", "--model", "c2", "--eta", "0.9", "--psi1", "0.4", "--psi2", "1.2", "--convention", "nope")
    assert code == 2


def test_cg_json_and_csv(capsys):
    code, out = _run(capsys, "cg", "--grid", "gamma:0.1:1.5:5")
    doc = json.loads(out)
    assert code == 0 and len(doc["rows"]) == 5
    for row in doc["rows"]:
        assert row["s"] == pytest.approx(row["h31"], abs=1e-12)
    code, out = _run(capsys, "cg", "--grid", "eta:0.2:3.0:4", "--format", "csv")
    assert code == 0
    assert out.splitlines()[1] == "eta,g,c,s,h21,h31"


@pytest.mark.parametrize(
    "argv",
    [
        ("solve", "--model", "dense", "--alpha", "1.0"),
        ("cg", "--grid", "theta:0:1:3"),
        ("solve", "--model", "dense", "--gamma", "0.7", "--alpha", "1.0", "--format", "csv"),
        ("holo-verify", "--model", "dense", "--gamma", "0.7", "--alpha", "1.0", "--tol", "-1"),
        ("holo-verify", "--model", "dense", "--gamma", "0.7", "--alpha", "1.0", "--rows", "0"),
        ("frobnicate",),
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _ = _run(capsys, *argv)
    assert code == 2


def test_report_aggregates_runs(tmp_path, capsys):
    good, bad = tmp_path / "good.json", tmp_path / "bad.json"
    assert main(["holo-verify", "--model", "dense", "--gamma", "0.7", "--alpha", "1.0", "-o", str(good)]) == 0
    assert main(["holo-verify", "--model", "dense", "--gamma", "0.7", "--alpha", "1.0", "--perturb", "0.01", "-o", str(bad)]) == 1
    summary = report_aggregate([good])
    assert summary["all_passed"] and summary["matrix"] == {"dense": {"holo-verify": True}}
    code, out = _run(capsys, "report", str(good), str(bad))
    assert code == 1
    assert json.loads(out)["matrix"]["dense"]["holo-verify"] is False
    code, out = _run(capsys, "report")
    assert code == 0


def test_report_malformed_input(tmp_path, capsys):
    junk = tmp_path / "junk.json"
    junk.write_text("not json")
    with pytest.raises(UsageError):
        report_aggregate([junk])
    code, _ = _run(capsys, "report", str(junk))
    assert code == 2


def test_run_config_round_trip():
    cfg = RunConfig("cg", grid="gamma:0.1:1:3")
    code, doc = run(cfg)
    assert code == 0
    assert doc["config"] == json.loads(dumps(cfg.to_dict()))


def test_reports_are_byte_identical(tmp_path):
    paths = [tmp_path / f"r{k}.json" for k in range(2)]
    for p in paths:
        main(["ybe-verify", "--model", "c2", "--eta", "0.9", "--psi1", "0.4", "--psi2", "1.2", "-o", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "parafermions.cli", "cg", "--grid", "gamma:0.2:0.4:2"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["passed"]
