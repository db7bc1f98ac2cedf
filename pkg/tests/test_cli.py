import json
import math
import os
import pathlib

import numpy as np
import pytest

from kirchdual.cli import dump_json, run_command

REPO = pathlib.Path(__file__).resolve().parents[1]
EXAMPLES = REPO / "docs" / "examples"
GOLDEN = pathlib.Path(__file__).parent / "data" / "golden_subcritical.json"


def run(capsys, *argv):
    code = run_command(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_problem(tmp_path, payload, name="prob.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


def test_solve_basic(capsys, tmp_path):
    path = write_problem(
        tmp_path,
        {"material": {"lambda": 1.0, "mu": 1.0}, "load": {"sigmas": [0.1, 0.08, 0.05]}},
    )
    code, out, err = run(capsys, "solve", path)
    assert code == 0 and not err
    doc = json.loads(out)
    assert doc["summary"] == {"n_positive": 1, "n_negative": 8, "n_mixed": 18, "n_solutions": 27}
    assert len(doc["solutions"]) == 27
    first = doc["solutions"][0]
    assert first["classification"] == "positive"
    assert first["triality"] == "global-minimizer"
    assert first["residual"] <= 1e-10
    for key in ("combo", "q", "varsigmas", "S_eigs", "T", "det_F_sign", "energies"):
        assert key in first


def test_solve_tensor_mode(capsys):
    code, out, _ = run(capsys, "solve", str(EXAMPLES / "tensor_load.json"))
    assert code == 0
    doc = json.loads(out)
    assert doc["load"]["mode"] == "tensor"
    assert doc["summary"]["n_positive"] == 1


@pytest.mark.parametrize(
    "payload",
    [
        {"material": {"lambda": 1.0}, "load": {"sigmas": [0.1, 0.1, 0.1]}},
        {"material": {"lambda": 1.0, "mu": 1.0}},
        {"material": {"lambda": 1.0, "mu": 1.0}, "load": {}},
        {"material": {"lambda": 1.0, "mu": 1.0},
         "load": {"sigmas": [0.1, 0.1, 0.1], "tau": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}},
        {"material": {"lambda": -2.0, "mu": 1.0}, "load": {"sigmas": [0.1, 0.1, 0.1]}},
    ],
)
def test_malformed_inputs_exit_2(capsys, tmp_path, payload):
    path = write_problem(tmp_path, payload)
    code, out, err = run(capsys, "solve", path)
    assert code == 2
    assert "error" in json.loads(err)


def test_not_json_exit_2(capsys, tmp_path):
    p = tmp_path / "nope.json"
    p.write_text("{ this is not json")
    code, _, err = run(capsys, "solve", str(p))
    assert code == 2
    assert json.loads(err)["error"]["type"] == "InputError"


def test_degenerate_stress_exit_2(capsys, tmp_path):
    path = write_problem(
        tmp_path,
        {"material": {"lambda": 1.0, "mu": 1.0},
         "load": {"tau": [[0, 0, 0], [0, 1, 0], [0, 0, 1]]}},
    )
    code, _, err = run(capsys, "solve", path)
    assert code == 2
    assert json.loads(err)["error"]["type"] == "DegenerateStress"


def test_verify_bundled_examples(capsys):
    for name in ("subcritical_scaled.json", "tensor_load.json", "supercritical_scaled.json"):
        code, out, _ = run(capsys, "verify", str(EXAMPLES / name))
        assert code == 0, f"verify failed for {name}:\n{out}"
        assert "[ok]" in out and "[FAIL]" not in out


def test_reconstruct(capsys):
    code, out, _ = run(capsys, "reconstruct", str(EXAMPLES / "tensor_load.json"), "--solution", "0")
    assert code == 0
    doc = json.loads(out)
    assert doc["deformation"]["kind"] == "affine"
    assert doc["deformation"]["det_F"] > 0
    assert doc["deformation"]["first_pk_round_trip_residual"] <= 1e-8
    F = np.asarray(doc["deformation"]["F"])
    assert F.shape == (3, 3)


def test_reconstruct_bad_index(capsys):
    code, _, err = run(capsys, "reconstruct", str(EXAMPLES / "tensor_load.json"), "--solution", "99")
    assert code == 2
    assert "solution" in json.loads(err)["error"]["message"]


def test_sweep_csv_shape(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, _, _ = run(
        capsys, "sweep", "--k", "0.2", "--sigma-grid", "2",
        "--range", "0.03:0.12", "--out", str(out_path),
    )
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    assert len(lines) == 2 ** 3 + 1
    header = lines[0].split(",")
    assert header == ["sigma1", "sigma2", "sigma3", "k",
                      "n_pos", "n_neg", "n_mixed", "min_residual", "max_residual"]
    for line in lines[1:]:
        cells = line.split(",")
        assert len(cells) == 9
        assert cells[4:7] == ["1", "8", "18"]
        assert float(cells[8]) <= 1e-10
    # grid order is deterministic: sigma3 fastest
    assert [float(l.split(",")[2]) for l in lines[1:3]] == [0.03, 0.12]


def test_sweep_respects_kd_threads(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("KD_THREADS", "1")
    code, out, _ = run(capsys, "sweep", "--k", "0.15", "--sigma-grid", "1", "--range", "0.05:0.1")
    assert code == 0
    assert len(out.strip().splitlines()) == 2


def test_sweep_bad_range(capsys):
    code, _, err = run(capsys, "sweep", "--k", "0.2", "--sigma-grid", "2", "--range", "oops")
    assert code == 2


def _close(a, b, tol=1e-9):
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(_close(a[k], b[k], tol) for k in a)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(_close(x, y, tol) for x, y in zip(a, b))
    if isinstance(a, float) or isinstance(b, float):
        if a is None or b is None:
            return a == b
        return math.isclose(float(a), float(b), rel_tol=tol, abs_tol=tol)
    return a == b


def test_golden_census_document(capsys):
    code, out, _ = run(capsys, "solve", str(EXAMPLES / "subcritical_scaled.json"))
    assert code == 0
    got = json.loads(out)
    expected = json.loads(GOLDEN.read_text())
    assert _close(got, expected), "census drifted from the golden regression file"


def test_dump_json_floats_round_trip():
    rng = np.random.default_rng(0)
    vals = [float(x) for x in rng.normal(size=50) * 10.0 ** rng.integers(-12, 12, size=50)]
    doc = {"values": vals, "nested": [{"x": v} for v in vals[:3]], "n": 7, "flag": True}
    text = dump_json(doc)
    back = json.loads(text)
    assert back["values"] == vals
    assert back["n"] == 7 and back["flag"] is True


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        run_command(["--version"])
    assert exc.value.code == 0
