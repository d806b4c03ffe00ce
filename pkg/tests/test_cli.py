import json
import subprocess
import sys

import pytest

from sumsetlab.bitwindow import BitWindow
from sumsetlab.cli import main

KEYS = {"experiment", "params", "metrics", "pass", "runtime_ms", "mode"}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_obstruction(capsys):
    code, rep = run(capsys, "obstruction", "--poly", "0,0,1", "--prime", "7")
    assert code == 0 and set(rep) == KEYS
    assert rep["metrics"]["image"] == [0, 1, 2, 4] and rep["metrics"]["pair"] == [1, 2]
    assert rep["pass"] is True and rep["metrics"]["r_p_hits"] == 0


def test_obstruction_surjective_fails(capsys):
    code, rep = run(capsys, "obstruction", "--poly", "0,1", "--prime", "5")
    assert code == 2 and rep["pass"] is False


def test_counterexample(capsys):
    code, rep = run(capsys, "counterexample", "--plo", "0,1", "--phi", "0,0,0,1", "--nmax", "1000")
    assert code == 0 and rep["metrics"]["hit_count"] == 0
    assert rep["params"]["max_removed"] == 0.1


def test_theorem2_small(capsys):
    code, rep = run(capsys, "theorem2", "--A", "weyl2:0.41421356,0,0.3", "--B", "mod:2,0",
                    "--poly", "0,0,1", "--nmax", "2000", "--minfrac", "0.999", "--L", "200")
    assert code == 0 and rep["metrics"]["hit_fraction"] >= 0.999
    assert rep["params"]["minfrac"] == 0.999 and rep["params"]["min_window_density"] == 0.99


def test_theorem1_threshold_fail(capsys):
    # residue classes that never hit n^2: no hits at all
    code, rep = run(capsys, "theorem1", "--A", "mod:7,1", "--B", "mod:7,2", "--nmax", "500", "--max-gap", "5")
    assert code == 2 and rep["pass"] is False and rep["metrics"]["max_gap"] is None
    assert rep["params"]["max_gap"] == 5


def test_theorem3_small(capsys):
    code, rep = run(capsys, "theorem3", "--poly", "0,1,1", "--poly", "0,0,1", "--nmax", "800")
    assert code == 0 and rep["metrics"]["hit_fraction"] >= 0.99


def test_gen_and_stats(capsys, tmp_path):
    path = str(tmp_path / "ev.bw1")
    code, rep = run(capsys, "gen", "--spec", "mod:2,0", "--hi", "1000", "--save", path)
    assert code == 0 and rep["metrics"]["count"] == 500
    assert BitWindow.load(path).count() == 500
    code, rep = run(capsys, "stats", "--input", path, "--L", "10", "--N", "999")
    assert code == 0 and rep["metrics"]["window_min_density"] == "1/2" and rep["metrics"]["max_gap"] == 2


def test_norms_exact_and_determinism(capsys):
    argv = ["norms", "--op", "backward", "--A", "mod:2,0", "--poly", "0,2", "--N", "100", "--J", "5,10",
            "--exact", "--min-value", "0.4"]
    code, rep = run(capsys, *argv)
    assert code == 0 and rep["mode"] == "exact" and rep["metrics"]["values"] == [0.5, 0.5]
    _, again = run(capsys, *argv)
    assert again["metrics"] == rep["metrics"]


def test_norms_float_determinism(capsys):
    argv = ["norms", "--op", "cesaro", "--A", "bern:0.5,7", "--N", "5000", "--H", "20"]
    _, a = run(capsys, *argv)
    _, b = run(capsys, *argv)
    assert a["mode"] == "float" and a["metrics"] == b["metrics"]


def test_vdc_small(capsys):
    code, rep = run(capsys, "vdc", "--families", "10", "--J", "512", "--I", "32")
    assert code == 0 and rep["metrics"]["candidates"] == 0 and rep["metrics"]["control_fails_hypothesis"]


def test_report_to_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    code = main(["obstruction", "--poly", "0,0,1", "--prime", "7", "--nmax", "0", "--out", str(out)])
    assert code == 0 and capsys.readouterr().out == ""
    assert json.loads(out.read_text())["experiment"] == "obstruction"


def exit_code(argv):
    try:
        return main(argv)
    except SystemExit as exc:  # argparse rejects before any work is done
        return exc.code


@pytest.mark.parametrize("argv,code", [
    (["gen", "--spec", "foo:1", "--hi", "10"], 3),
    (["gen", "--hi", "10"], 3),
    (["nonsense"], 3),
    (["obstruction", "--poly", "0,0,1", "--prime", "8"], 3),
    (["obstruction", "--poly", "1,x", "--prime", "7"], 3),
    (["theorem3", "--poly", "0,0,1", "--poly", "1,0,1", "--nmax", "10"], 3),
    (["norms", "--op", "backward", "--N", "2000", "--J", "50", "--poly", "0,0,1", "--hi", "100"], 0),
    (["norms", "--op", "b_nj", "--N", "50", "--J", "5", "--poly", "0,0,1", "--hi", "100"], 4),
    (["theorem1", "--poly", "0,0,0,0,0,0,0,0,0,0,0,0,1", "--nmax", "10000"], 4),
])
def test_exit_codes(argv, code, capsys):
    assert exit_code(argv) == code


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "sumsetlab", "obstruction", "--poly", "0,1", "--prime", "3",
                        "--nmax", "0"], capture_output=True, text=True)
    assert r.returncode == 2 and json.loads(r.stdout)["metrics"]["surjective"] is True
    r = subprocess.run([sys.executable, "-m", "sumsetlab", "bogus"], capture_output=True, text=True)
    assert r.returncode == 3
