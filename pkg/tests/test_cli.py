import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from eigenmoduli.cli import main

MODELS = Path(__file__).resolve().parents[1] / "models"
TOY = MODELS / "toy.json"


@pytest.fixture(scope="module")
def toy_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("toy")
    code = main(["functional", "--model", str(TOY), "--out", str(out)])
    return code, out


def test_functional(toy_run, capsys):
    code, out = toy_run
    assert code == 0
    doc = json.loads((out / "functional.json").read_text())
    assert doc["degree"] == 6 and doc["homogeneous"] is True
    assert doc["principal"]["variables"] == ["F", "n1", "n2"]
    assert doc["statistics"]["minors"] == 20


def test_functional_summary_line(tmp_path, capsys):
    main(["functional", "--model", str(TOY), "--out", str(tmp_path)])
    assert "degree 6, homogeneous, principal" in capsys.readouterr().out


def test_budget_exhaustion_is_loud(tmp_path, capsys):
    code = main(["functional", "--model", str(TOY), "--out", str(tmp_path), "--budget", "200"])
    assert code == 1
    doc = json.loads((tmp_path / "functional_budget.json").read_text())
    assert doc["statistics"]["reduction_steps"] > 200
    assert "budget" in capsys.readouterr().err


def test_functional_document_reproducible(toy_run, tmp_path):
    _, out = toy_run
    assert main(["functional", "--model", str(TOY), "--out", str(tmp_path)]) == 0
    docs = [json.loads((d / "functional.json").read_text()) for d in (out, tmp_path)]
    for d in docs:
        d["statistics"].pop("wall_time")
    assert docs[0] == docs[1]


def test_reformulated_functional(toy_run, tmp_path):
    _, out = toy_run
    assert main(["functional", "--model", str(TOY), "--out", str(tmp_path), "--form", "real",
                 "--radicals", "rescale", "--strategy", "sugar"]) == 0
    ref, alt = (json.loads((d / "functional.json").read_text()) for d in (out, tmp_path))
    assert alt["principal"] == ref["principal"]
    assert alt["statistics"]["rescaling_weights"] == [1, 2, 1]


def test_real_form_needs_square_enough_family(tmp_path, capsys):
    # one boson on two sites: N = 2 < M = 3
    doc = json.loads(TOY.read_text())
    doc["n"] = 1
    model = tmp_path / "one.json"
    model.write_text(json.dumps(doc))
    assert main(["functional", "--model", str(model), "--out", str(tmp_path), "--form", "real"]) == 2
    assert "M <= N" in capsys.readouterr().err


@pytest.mark.parametrize("content", ["{not json", '{"q": 2}', '{"q": 2, "n": 2, "colour": 1}',
                                     '{"kind": "oscillator", "truncation": 2}'])
def test_malformed_model(tmp_path, content, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(content)
    assert main(["functional", "--model", str(bad), "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_usage_errors(tmp_path):
    assert main([]) == 2
    assert main(["sample", "--model", str(TOY), "--samples", "0", "--out", str(tmp_path)]) == 2
    assert main(["sample", "--model", str(tmp_path / "missing.json")]) == 2
    assert main(["sample", "--model", str(TOY), "--lambda-grid", "x:1"]) == 2
    assert main(["verify", "--model", str(TOY), "--out", str(tmp_path)]) == 2


def test_toml_model(tmp_path):
    assert main(["spectrum", "--model", str(MODELS / "three_bosons.toml"),
                 "--out", str(tmp_path), "--lambda", "1", "0", "0"]) == 0
    doc = json.loads((tmp_path / "spectrum.json").read_text())
    assert len(doc["eigenvalues"]) == 4


def test_sample_cloud_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["sample", "--model", str(TOY), "--out", str(d), "--samples", "10000"]) == 0
    for name in ("cloud.csv", "trace.csv", "cusps.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    rows = list(csv.reader((a / "cloud.csv").open()))
    assert rows[0] == ["source", "index", "branch", "lambda_F", "lambda_n1", "lambda_n2",
                       "F", "n1", "n2"]
    kinds = [r[0] for r in rows[1:]]
    assert kinds.count("sample") == 10000 and kinds.count("eigen") == 300
    cusps = list(csv.reader((a / "cusps.csv").open()))
    assert [r[0] for r in cusps[1:]] == ["1", "1", "1"]


def test_different_seed_changes_cloud(tmp_path):
    main(["sample", "--model", str(TOY), "--out", str(tmp_path / "a"), "--samples", "50"])
    main(["sample", "--model", str(TOY), "--out", str(tmp_path / "b"), "--samples", "50",
          "--seed", "1"])
    assert (tmp_path / "a" / "cloud.csv").read_bytes() != (tmp_path / "b" / "cloud.csv").read_bytes()


def test_verify_toy(toy_run, tmp_path, capsys):
    _, out = toy_run
    code = main(["verify", "--model", str(TOY), "--functional", str(out / "functional.json"),
                 "--out", str(tmp_path)])
    assert code == 0
    rep = json.loads((tmp_path / "verify.json").read_text())
    assert set(rep["checks"]) == {"variety", "variational_bound", "normal_vector"}
    assert rep["passed"] is True
    assert rep["checks"]["variety"]["max_relative_residual"] < 1e-8


def test_verify_tolerance_override(toy_run, tmp_path):
    _, out = toy_run
    code = main(["verify", "--model", str(TOY), "--functional", str(out / "functional.json"),
                 "--out", str(tmp_path), "--samples", "100", "--tol-variety", "1e-300"])
    assert code == 1


def test_verify_negative_control(tmp_path, capsys):
    other = tmp_path / "other.json"
    other.write_text(json.dumps({"q": 2, "n": 2, "hopping": "1", "onsite": "3", "intersite": "1/2"}))
    assert main(["functional", "--model", str(other), "--out", str(tmp_path / "f")]) == 0
    code = main(["verify", "--model", str(TOY), "--functional", str(tmp_path / "f" / "functional.json"),
                 "--out", str(tmp_path / "v"), "--samples", "1000"])
    assert code == 1
    rep = json.loads((tmp_path / "v" / "verify.json").read_text())
    assert rep["checks"]["variety"]["passed"] is False
    assert rep["checks"]["variety"]["max_relative_residual"] > 1e-3


def test_verify_oscillator(tmp_path):
    assert main(["verify", "--model", str(MODELS / "oscillator.json"), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "verify.json").read_text())
    assert rep["checks"]["uncertainty"]["violations"] == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "eigenmoduli", "spectrum", "--model", str(TOY),
                           "--out", str(tmp_path)], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert float(proc.stdout.split()[1]) == pytest.approx((1 - 17 ** 0.5) / 2, abs=1e-12)
