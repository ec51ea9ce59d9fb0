import csv
import json
import os
import subprocess
import sys

import pytest

from srbm_wedge.cli import run
from srbm_wedge.fixtures import get

SKEW = ["--beta", "1/2", "--theta", "1/4", "--delta", "3/5", "--eps", "2/5"]


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


@pytest.fixture
def skew_file(tmp_path):
    q = get("skew_symmetric").model()
    doc = dict(q.to_json_dict(), angles_exact=get("skew_symmetric").angles.to_json_dict())
    p = tmp_path / "skew.json"
    p.write_text(json.dumps(doc))
    return str(p)


def test_classify_from_flags(capsys):
    code, rep, _ = _run(capsys, "classify", *SKEW)
    assert code == 0
    assert rep["results"]["nature"] == "rational"
    assert rep["results"]["simple_condition"] == {"r": 1, "k": 0}
    assert len(rep["model_fingerprint"]) == 16
    assert set(rep) == {"command", "model_fingerprint", "results", "tolerances", "checks"}


def test_model_file_and_flags_agree(capsys, skew_file):
    code, rep, _ = _run(capsys, "angles", "--model", skew_file)
    assert code == 0
    assert rep["results"]["over_pi"]["beta"] == pytest.approx(0.5)
    code, _, err = _run(capsys, "classify", "--model", skew_file, "--beta", "1/2", "--theta", "1/4",
                        "--delta", "3/5", "--eps", "1/3")
    assert code == 2 and "disagree" in err


def test_fingerprint_is_stable(capsys, skew_file):
    a = _run(capsys, "classify", "--model", skew_file)[1]["model_fingerprint"]
    b = _run(capsys, "angles", "--model", skew_file)[1]["model_fingerprint"]
    assert a == b


@pytest.mark.parametrize("argv", [
    ["classify", "--beta", "1/2"],
    ["classify"],
    ["classify", "--beta", "1/2", "--theta", "x", "--delta", "3/5", "--eps", "2/5"],
    ["laplace", *SKEW, "--eval", "z=1"],
    ["density", *SKEW, "--grid", "n=1"],
])
def test_invalid_input_exit_code(capsys, argv):
    assert _run(capsys, *argv)[0] == 2


def test_invalid_model_file(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"sigma": [1, 2, 1], "mu": [-1, -1], "R": [[1, 0], [0, 1]]}))
    assert _run(capsys, "classify", "--model", str(p))[0] == 2
    p.write_text("{not json")
    assert _run(capsys, "classify", "--model", str(p))[0] == 2


def test_not_covered_exit_code(capsys):
    code, _, err = _run(capsys, "laplace", "--beta", "1/2", "--theta", "1/4", "--delta", "2/3", "--eps", "5/12")
    assert code == 3 and "not covered" in err
    assert _run(capsys, "density", "--beta", "2/3", "--theta", "1/3", "--delta", "3/4", "--eps", "7/12")[0] == 3


def test_laplace_eval(capsys):
    code, rep, _ = _run(capsys, "laplace", *SKEW, "--eval", "y=-1", "--eval", "x=-0.5", "--eval", "x=-1,y=-2+1i")
    assert code == 0
    rows = rep["results"]
    assert set(rows[0]) == {"y", "phi1"} and set(rows[1]) == {"x", "phi2"} and set(rows[2]) == {"x", "y", "phi"}
    assert isinstance(rows[2]["phi"], list)


def test_density_plot(capsys, tmp_path):
    svg = tmp_path / "d.svg"
    code, rep, _ = _run(capsys, "density", *SKEW, "--grid", "n=10,max=3", "--plot", str(svg))
    assert code == 0
    assert rep["results"]["form"]["kind"] == "sum_of_exponentials"
    assert len(rep["results"]["grid"]) == 10
    assert svg.read_text().lstrip().startswith("<svg")


def test_moments_with_recurrence(capsys):
    code, rep, _ = _run(capsys, "moments", "--beta", "2/3", "--theta", "1/2", "--delta", "7/12", "--eps", "3/4",
                        "--n", "8")
    assert code == 0
    assert all(c["passed"] for c in rep["checks"].values())


def test_verify_and_examples(capsys):
    code, rep, _ = _run(capsys, "verify", *SKEW)
    assert code == 0
    assert rep["checks"] and all(c["passed"] for c in rep["checks"].values())
    code, rep, err = _run(capsys, "examples")
    assert code == 0
    assert "skew_symmetric" in err


def test_simulate_is_reproducible(capsys, tmp_path):
    csv_path = tmp_path / "h.csv"
    argv = ["simulate", *SKEW, "--horizon", "5", "--dt", "0.001", "--paths", "2", "--csv", str(csv_path)]
    run(argv)
    first = capsys.readouterr().out
    run(argv)
    assert capsys.readouterr().out == first
    rep = json.loads(first)
    assert rep["results"]["n_samples"] > 0
    with open(csv_path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["z1_lo", "z1_hi", "z2_lo", "z2_hi", "mass"]
    assert len(rows) == 1 + 20 * 20


def test_module_entry_point():
    env = dict(os.environ, SRBM_SIMCORE="python")
    out = subprocess.run([sys.executable, "-m", "srbm_wedge", "classify", *SKEW], capture_output=True, text=True,
                         env=env, check=True)
    assert json.loads(out.stdout)["results"]["nature"] == "rational"


def test_python_fallback_selected_by_environment():
    code = "import srbm_wedge as s; print(s.simcore_backend())"
    env = dict(os.environ, SRBM_SIMCORE="python")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"
