import json
from fractions import Fraction
import subprocess
import sys

import pytest

from hypslit.cli import main
from hypslit.surface import Surface


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def hyp2_file(tmp_path, capsys):
    path = tmp_path / "s.json"
    code, out, _ = run(["build", "--builtin", "hyp2", "--out", str(path)], capsys)
    assert code == 0
    assert json.loads(out)["stratum"] == "H(2)"
    return path


def test_build_and_validate(hyp2_file, capsys):
    code, out, _ = run(["validate", "--surface", str(hyp2_file)], capsys)
    info = json.loads(out)
    assert code == 0 and info["valid"] and info["dim_c"] == 4
    assert info["involution"] == "hyperelliptic"


def test_build_chain(tmp_path, capsys):
    path = tmp_path / "c.json"
    code, out, _ = run(["build", "--chain", "1,0;0,1 | 0,1;-1,0 | -1,0;0,-1", "--out", str(path)], capsys)
    assert code == 0 and json.loads(out)["stratum"] == "H(2)"
    assert Surface.load(path).dim_c == 4


def test_build_rejects_unshared_chain(tmp_path, capsys):
    code, _, err = run(["build", "--chain", "1/1,0;0,1 | 1,0;1,1 | 1,0;0,1",
                        "--out", str(tmp_path / "x.json")], capsys)
    assert code == 2 and "share" in err


def test_build_random_is_seeded(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(["build", "--random", "5", "--seed", "11", "--out", str(p)], capsys)[0] == 0
    assert a.read_text() == b.read_text()
    assert Surface.load(a).stratum().kappa == (4,)


def test_enumerate_csv(hyp2_file, capsys):
    code, out, _ = run(["enumerate", "--surface", str(hyp2_file), "--slit", "3", "--L", "16"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "start_vertex,hol_x,hol_y,len_sq,size_j,invariant"
    assert len(lines) > 10


def test_enumerate_decimal_length(capsys):
    code, out, _ = run(["enumerate", "--surface", "builtin:slit-torus", "--L", "1.5"], capsys)
    assert code == 0
    assert all(Fraction(r.split(",")[3]) <= Fraction(9, 4) for r in out.splitlines()[1:])


def test_unknown_subcommand(capsys):
    code, _, err = run(["frobnicate"], capsys)
    assert code == 1 and "usage" in err


def test_missing_arguments(capsys):
    assert run(["enumerate", "--surface", "builtin:hyp2"], capsys)[0] == 1
    assert run(["validate"], capsys)[0] == 1
    assert run([], capsys)[0] == 1
    assert run(["validate", "--surface", "/nonexistent.json"], capsys)[0] == 1
    assert run(["validate", "--surface", "builtin:hyp2", "--slit", "99"], capsys)[0] == 1


def test_invalid_surface_file(tmp_path, capsys):
    p = tmp_path / "t.json"
    run(["build", "--builtin", "torus", "--out", str(p)], capsys)
    s = json.loads(p.read_text())
    s["triangles"][0][0] = ["5/1", "0/1"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(s))
    code, _, err = run(["validate", "--surface", str(bad)], capsys)
    assert code == 2 and "close" in err


def test_noninvariant_slit_is_geometry_error(capsys):
    code, _, err = run(["nps", "--surface", "builtin:hyp2", "--slit", "2"], capsys)
    assert code == 2 and "invariant" in err


def test_flow_round_trip(hyp2_file, tmp_path, capsys):
    out = tmp_path / "f.json"
    assert run(["flow", "--surface", str(hyp2_file), "--horocycle", "1/3", "--out", str(out)], capsys)[0] == 0
    assert run(["flow", "--surface", str(out), "--horocycle=-1/3"], capsys)[0] == 0
    assert Surface.load(out).triangles == Surface.load(hyp2_file).triangles
    assert run(["flow", "--surface", str(out), "--dilate", "2"], capsys)[0] == 0
    assert Surface.load(out).area() == 3
    assert run(["flow", "--surface", str(out), "--dilate", "0"], capsys)[0] == 2
    assert run(["flow", "--surface", str(out)], capsys)[0] == 1


def test_nps_trace(capsys):
    code, out, _ = run(["nps", "--surface", "builtin:hyp4"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["trace"][-1]["kind"] == "cylinder"
    assert data["certificate"]["contains_slit"]


def test_decompose(capsys):
    code, out, _ = run(["decompose", "--surface", "builtin:hyp4"], capsys)
    assert code == 0 and len(json.loads(out)["parallelograms"]) == 5


def test_experiment_commands(tmp_path, capsys):
    code, out, err = run(["count", "--surface", "builtin:slit-torus", "--grid", "4,8,16", "--band"], capsys)
    assert code == 0 and out.startswith("L,count_all") and err.startswith("band")
    code, out, _ = run(["cylinders", "--surface", "builtin:slit-torus", "--grid", "4,8,16,32"], capsys)
    assert code == 0 and "# slope" in out
    code, out, _ = run(["triangles", "--surface", "builtin:hyp2", "--j-min", "1", "--j-max", "3",
                        "--format", "json"], capsys)
    assert code == 0 and len(json.loads(out)["rows"]) == 3
    code, out, _ = run(["badtimes", "--surface", "builtin:hyp2", "--T", "16"], capsys)
    assert code == 0 and json.loads(out)["ratio"] == "0/1"
    code, out, _ = run(["directions", "--surface", "builtin:slit-torus", "--L", "8,16",
                        "--format", "json"], capsys)
    assert code == 0 and all(x["within_bound"] for x in json.loads(out)["summary"])
    plot = tmp_path / "p.gp"
    out_csv = tmp_path / "c.csv"
    assert run(["count", "--surface", "builtin:hyp2", "--grid", "2,4", "--out", str(out_csv),
                "--plot", str(plot)], capsys)[0] == 0
    assert out_csv.read_text().startswith("L,") and "plot" in plot.read_text()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hypslit", "validate", "--surface", "builtin:torus"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["stratum"] == "H(0)"


@pytest.mark.parametrize("argv", [
    ["enumerate", "--surface", "builtin:hyp2", "--L", "12"],
    ["count", "--surface", "builtin:hyp2", "--grid", "4,8,16"],
])
def test_threads_do_not_change_output(argv, capsys):
    one = run(argv + ["--threads", "1"], capsys)
    many = run(argv + ["--threads", "3"], capsys)
    assert one[0] == many[0] == 0
    assert one[1] == many[1]
