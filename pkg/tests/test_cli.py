import json
from pathlib import Path

import pytest

from twisted_growth import cli
from twisted_growth.autom import Automorphism
from twisted_growth.counting import GrowthTable
from twisted_growth.nilgroup import GroupSpec

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def cfg(name):
    return str(CONFIGS / f"{name}.json")


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


# -- classify / decide ------------------------------------------------------------------------

def test_classify_h3_identity(capsys):
    code, out, _ = run(capsys, "classify", "--spec", cfg("h3"), "--aut", cfg("h3_identity"))
    assert code == 0
    assert out.splitlines()[-1] == "growth: n^2·log(n)"
    assert "frak_d: 2" in out


def test_classify_h3_flip(capsys):
    code, out, _ = run(capsys, "classify", "--spec", cfg("h3"), "--aut", cfg("h3_flip"))
    assert code == 0 and out.splitlines()[-1] == "growth: n^1"


def test_malformed_omega_exits_nonzero(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"omega": [[0, 1], [1, 0]]}))
    code, _, err = run(capsys, "classify", "--spec", bad, "--aut", cfg("h3_identity"))
    assert code != 0 and "skew" in err


def test_invalid_automorphism_reports_violations(capsys, tmp_path):
    aut = tmp_path / "aut.json"
    aut.write_text(json.dumps(Automorphism.from_lists([[2, 0], [0, 1]]).to_json()))
    code, _, err = run(capsys, "classify", "--spec", cfg("h3"), "--aut", aut)
    assert code == 2 and "invalid automorphism" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "classify", "--spec", "nope.json", "--aut", cfg("h3_identity"))
    assert code == 2 and "no such file" in err


@pytest.mark.parametrize("g,h,verdict", [("1,0,0", "1,0,4", "conjugate"),
                                         ("0,0,0", "0,0,2", "not-conjugate"),
                                         ("1,0,0", "1,0,2", "conjugate")])
def test_decide(capsys, g, h, verdict):
    code, out, _ = run(capsys, "decide", "--spec", cfg("h3"), "--aut", cfg("h3_identity"), g, h)
    assert code == 0 and out.split()[0] == verdict


def test_decide_rejects_elements_outside_group(capsys):
    code, _, err = run(capsys, "decide", "--spec", cfg("h3"), "--aut", cfg("h3_identity"), "0,0,1", "0,0,1")
    assert code == 2 and err.startswith("error:")


# -- count / fit ---------------------------------------------------------------------------------

def test_count_writes_csv(capsys, tmp_path):
    out = tmp_path / "t.csv"
    code, _, _ = run(capsys, "count", "--spec", cfg("h3"), "--aut", cfg("h3_identity"),
                     "--radius", 20, "-o", out)
    assert code == 0
    T = GrowthTable.from_csv(out.read_text())
    assert len(T) == 20 and T.rows[0] == (1, 7, 7)
    code, text, _ = run(capsys, "fit", out, "--spec", cfg("h3"), "--aut", cfg("h3_identity"))
    assert code == 0
    assert "selected: n^2·log(n)" in text and "match: True" in text


def test_fit_synthetic_csv(capsys, tmp_path):
    path = tmp_path / "sq.csv"
    path.write_text("n,classes,ball\n" + "".join(f"{n},{n * n},{n * n}\n" for n in range(1, 21)))
    code, out, _ = run(capsys, "fit", path)
    assert code == 0 and "selected: n^2\n" in out and "log_factor: False" in out


def test_fit_empty_csv(capsys, tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    code, _, err = run(capsys, "fit", path)
    assert code == 2 and "empty" in err


def test_radius_cap(capsys):
    args = ["count", "--spec", cfg("h3"), "--aut", cfg("h3_identity"), "--radius", 26]
    code, _, err = run(capsys, *args)
    assert code == 2 and "--force" in err


# -- number theory -------------------------------------------------------------------------------

def test_gcdsum_identity_maps(capsys):
    code, out, err = run(capsys, "gcdsum", "--d", 2, "--grid", "100,300,1000")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "N,value,model,ratio" and len(lines) == 4
    spread = float(err.split()[-1])
    assert spread < 0.25


def test_gcdsum_theta_system_from_files(capsys):
    code, out, err = run(capsys, "gcdsum", "--spec", cfg("h3"), "--aut", cfg("h3_identity"),
                         "--grid", "100,300,1000")
    assert code == 0 and float(err.split()[-1]) < 0.25


def test_gcdsum_needs_grid_and_respects_cap(capsys):
    assert run(capsys, "gcdsum", "--grid", "10,20")[0] == 2
    code, _, err = run(capsys, "gcdsum", "--grid", "10,20,20000")
    assert code == 2 and "cap" in err


def test_totient(capsys):
    code, out, _ = run(capsys, "totient", "--grid", "10,1000")
    assert code == 0
    rows = out.splitlines()
    assert rows[1].startswith("10,32,")
    assert rows[2].startswith("1000,304192,")


def test_totient_cap(capsys):
    assert run(capsys, "totient", "--N", 10 ** 8)[0] == 2


# -- construct-log ---------------------------------------------------------------------------------

def test_construct_log_h5(capsys, tmp_path):
    out = tmp_path / "aut.json"
    code, _, _ = run(capsys, "construct-log", cfg("h5"), "-o", out)
    assert code == 0
    psi = Automorphism.from_json(json.loads(out.read_text()))
    assert psi.matrix == [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1], [0, 0, 0, 1]]
    code, text, _ = run(capsys, "classify", "--spec", cfg("h5"), "--aut", out)
    assert "frak_d: 2" in text and "growth: n^2·log(n)" in text


# -- determinism -----------------------------------------------------------------------------------

@pytest.mark.parametrize("argv", [
    ["classify", "--spec", cfg("k3"), "--aut", cfg("k3_shear")],
    ["count", "--spec", cfg("k3"), "--aut", cfg("k3_hyperbolic"), "--radius", "6"],
    ["fit", "--spec", cfg("h3"), "--aut", cfg("h3_shear"), "--radius", "10"],
    ["gcdsum", "--d", "3", "--grid", "10,20,30"],
    ["totient", "--grid", "5,50,500"],
    ["construct-log", cfg("k3")],
    ["decide", "--spec", cfg("k3"), "--aut", cfg("k3_nondegenerate"), "1,0,3,0", "1,0,3,4"],
])
def test_outputs_are_byte_identical(capsys, tmp_path, argv):
    outs = []
    for i in range(2):
        path = tmp_path / f"o{i}"
        assert cli.main(argv + ["-o", str(path)]) == 0
        outs.append(path.read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1] and outs[0]


def test_dump_json_matrix_rows_on_one_line():
    text = cli.dump_json({"M": [[1, 0], [0, 1]], "eps": 1})
    assert "[1, 0]" in text and json.loads(text) == {"M": [[1, 0], [0, 1]], "eps": 1}


def test_config_files_load():
    for name in ("h3", "h5", "k3"):
        GroupSpec.from_json(json.loads(Path(cfg(name)).read_text()))
