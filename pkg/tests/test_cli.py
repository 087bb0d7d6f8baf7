import csv
import json

import numpy as np
import pytest

from greedylab.cli import main
from greedylab.seqlab import power_sequence
from greedylab.spaces import load_space


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def l2(tmp_path):
    return _write(tmp_path / "l2.json", {"kind": "weighted-lp", "p": 2.0, "weights": [1, 1, 1, 1]})


def _constants(path):
    data = json.loads((path / "constants.json").read_text())["constants"]
    vals = []
    for v in data.values():
        vals += [c["value"] for c in v] if isinstance(v, list) else [v["value"]]
    return vals


def test_analyze_l2(tmp_path, l2):
    out = tmp_path / "a"
    assert main(["analyze", "--space", l2, "--out", str(out)]) == 0
    assert np.allclose(_constants(out), 1.0, atol=1e-9)
    rows = list(csv.reader((out / "profile.csv").open()))
    assert len(rows) == 5 and (out / "summary.txt").exists()


def test_analyze_haar_profile_rows(tmp_path):
    space = _write(tmp_path / "h.json", {"kind": "haar", "levels": 3, "p": 3.0})
    out = tmp_path / "h"
    assert main(["analyze", "--space", space, "--out", str(out), "--caps", '{"samples": 60, "slc_size": 1}']) == 0
    assert len((out / "profile.csv").read_text().splitlines()) == 1 + 8


def test_bad_json_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{kind: ")
    assert main(["analyze", "--space", str(bad), "--out", str(tmp_path / "x")]) == 2
    assert main(["verify", "--space", _write(tmp_path / "u.json", {"kind": "nope"}), "--out", str(tmp_path)]) == 2


def test_decreasing_dual_exit_4(tmp_path, l2):
    sig = _write(tmp_path / "s.json", {"values": [1.0, 3.0, 3.1, 3.2]})
    assert main(["renorm", "--space", l2, "--sigma", sig, "--out", str(tmp_path / "r")]) == 4


def test_cap_exit_3(tmp_path):
    big = _write(tmp_path / "big.json", {"kind": "weighted-lp", "p": 2.0, "weights": [1] * 20})
    assert main(["analyze", "--space", big, "--out", str(tmp_path / "b")]) == 3


def test_renorm_then_analyze_l2(tmp_path, l2):
    sig = _write(tmp_path / "s.json", power_sequence(0.5, 4).to_json())
    r = tmp_path / "r"
    assert main(["renorm", "--space", l2, "--sigma", sig, "--out", str(r)]) == 0
    model = load_space(r / "renormed.json")
    rows = list(csv.DictReader((r / "eval.csv").open()))
    for row in rows:
        v = np.array([float(x) for x in row["vector"].split()])
        assert model.norm(v) == float(row["renormed_norm"])
    a = tmp_path / "a"
    assert main(["analyze", "--space", str(r / "renormed.json"), "--out", str(a),
                 "--caps", '{"samples": 40, "slc_size": 2}']) == 0
    assert np.allclose(_constants(a), 1.0, atol=1e-6)


def test_renorm_almost_greedy_user_delta(tmp_path, l2):
    sig = _write(tmp_path / "s.json", power_sequence(0.5, 4).to_json())
    r = tmp_path / "r"
    assert main(["renorm", "--space", l2, "--sigma", sig, "--kind", "almost-greedy", "--eps", "0.1",
                 "--delta", "0.001", "--out", str(r)]) == 0
    consts = json.loads((r / "renorm_constants.json").read_text())["constants"]
    assert consts["delta"] == 0.001 and consts["provenance"]["delta"] == "user-supplied"


def test_verify_l2_and_haar_p2(tmp_path, l2):
    assert main(["verify", "--space", l2, "--out", str(tmp_path / "v")]) == 0
    haar = _write(tmp_path / "h.json", {"kind": "haar", "levels": 2, "p": 2.0})
    assert main(["verify", "--space", haar, "--out", str(tmp_path / "w")]) == 0
    checks = json.loads((tmp_path / "w" / "verify.json").read_text())["checks"]
    ku = [c for c in checks if c["name"] == "K_u = 1"]
    assert ku and ku[0]["passed"]
    assert all(c["anchor"] for c in checks)


def test_verify_failure_exit_1(tmp_path, l2):
    # an impossible tolerance forces a failing check
    assert main(["verify", "--space", l2, "--out", str(tmp_path / "v"), "--tol", '{"axioms": -1}']) == 1


def test_sequence_command(tmp_path):
    sig = _write(tmp_path / "s.json", power_sequence(0.5, 16).to_json())
    out = tmp_path / "q"
    assert main(["sequence", "--sigma", sig, "--out", str(out), "--dini"]) == 0
    rep = json.loads((out / "regularity.json").read_text())
    assert rep["schema_version"] == 1 and rep["regularity"]["lrp_witness"] == 4
    assert len((out / "dini.csv").read_text().splitlines()) == 17


def test_renorm_haar_roundtrip(tmp_path):
    space = _write(tmp_path / "h.json", {"kind": "haar", "levels": 3, "p": 3.0})
    sig = _write(tmp_path / "s.json", power_sequence(1 / 3, 8).to_json())
    r = tmp_path / "r"
    assert main(["renorm", "--space", space, "--sigma", sig, "--out", str(r)]) == 0
    model = load_space(r / "renormed.json")
    for row in csv.DictReader((r / "eval.csv").open()):
        v = np.array([float(x) for x in row["vector"].split()])
        assert model.norm(v) == float(row["renormed_norm"])
