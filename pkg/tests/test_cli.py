import json
import os

import pytest

from ihkunneth.cli import main
from ihkunneth.library import SpaceFileError, load_space, parse_expression, parse_space, serialize_space
from ihkunneth.stratcomplex import is_isomorphic

SPACES = os.path.join(os.path.dirname(__file__), "..", "spaces")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_ih_cone_on_circle(capsys):
    code, out, _ = run(capsys, "ih", "--space", "cone(s1)", "--perversity", "0,0,0")
    assert code == 0 and out.strip() == "(Z)"


def test_ih_relative_and_rings(capsys):
    code, out, _ = run(capsys, "ih", "--space", "cone(rp2)", "--perversity", "0,0,0,1", "--relative", "rp2")
    assert code == 0 and out.strip() == "(0, 0, Z/2)"
    code, out, _ = run(capsys, "ih", "--space", "susp(rp2)", "--ring", "Zp:2", "--perversity", "top")
    assert code == 0 and out.strip() == "(Z/2, 0, Z/2, Z/2)"


def test_ih_on_product_with_table(capsys):
    code, out, _ = run(capsys, "ih", "--space", "product(cone(s1),cone(s1))", "--q-mode", "table",
                       "--table", "0,0,0;0,0,0;0,0,0")
    assert code == 0 and out.strip() == "(Z)"


def test_kunneth_check_shift_two_mismatch(capsys, tmp_path):
    path = tmp_path / "rep.json"
    code, out, _ = run(capsys, "kunneth-check", "--x", "susp(rp2)", "--y", "susp(rp2)", "--shift", "2",
                       "--out", str(path))
    assert code == 1
    assert "MISMATCH" in out and "2c-FAIL" in out
    rep = json.loads(path.read_text())
    assert rep["conditions"]["cells"]["3,3"]["tag"] == "2c-FAIL"
    assert rep["conditions"]["cells"]["3,3"]["tor"] == "Z/2"


def test_kunneth_check_pass(capsys):
    code, out, _ = run(capsys, "kunneth-check", "--x", "cone(s1)", "--y", "s1")
    assert code == 0 and out.startswith("IH^Q") and ": PASS" in out


def test_cone_and_join_checks(capsys):
    assert run(capsys, "cone-check", "--space", "rp2", "--perversity", "0,0,0,1")[0] == 0
    assert run(capsys, "cone-check", "--space", "t2", "--coeff", "r0", "--perversity", "top")[0] == 0
    code, out, _ = run(capsys, "join-check", "--l1", "s1", "--l2", "rp2", "--shift", "1")
    assert code == 0 and "PASS" in out


def test_super_counterexample_command(capsys):
    code, out, _ = run(capsys, "super-counterexample")
    assert code == 0 and "counterexample confirmed" in out


def test_explore(capsys):
    code, out, _ = run(capsys, "explore", "--x", "cone(s1)", "--y", "cone(s1)", "--ring", "Q", "--shifts", "0,1,2")
    assert code == 0
    assert len(out.strip().splitlines()) == 4


def test_validate_and_link(capsys):
    code, out, _ = run(capsys, "validate", "--space", "cone(t2)")
    assert code == 0 and "occupied codimensions: [0, 3]" in out
    code, out, _ = run(capsys, "link", "--space", "susp(rp2)", "--vertex", "north")
    assert code == 0 and "codimension 3" in out and "IH: (Z, Z/2)" in out
    code, out, _ = run(capsys, "homology", "--space", "susp(rp2)")
    assert code == 0 and out.strip() == "(Z, 0, Z/2)"


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "ih", "--space", "cone(s1)", "--bogus")[0] == 2
    assert run(capsys, "ih", "--space", "cone(s1)", "--ring", "Zp:6")[0] == 2
    code, _, err = run(capsys, "ih", "--space", "cone(nowhere)")
    assert code == 2 and "error" in err
    code, _, err = run(capsys, "ih", "--space", "cone(s1)", "--perversity", "1,0")
    assert code == 2
    code, _, err = run(capsys, "kunneth-check", "--x", "cone(rp2)", "--y", "cone(rp2)", "--budget", "10")
    assert code == 2 and "budget" in err
    assert run(capsys, "ih", "--space", "product(cone(s1),cone(s1))", "--q-mode", "table")[0] == 2


def test_space_file_round_trip(tmp_path):
    X = parse_expression("product(cone(s1),s1)")
    path = tmp_path / "x.space"
    path.write_text(serialize_space(X))
    Y = load_space(str(path))
    assert is_isomorphic(X, Y)


def test_space_file_errors():
    with pytest.raises(SpaceFileError) as info:
        parse_space("dim 1\nvertex a 1\nsimplex a b\n")
    assert "line 3" in str(info.value)
    with pytest.raises(SpaceFileError):
        parse_space("dim two\n")


def test_bundled_spaces(capsys):
    code, out, _ = run(capsys, "ih", "--space", os.path.join(SPACES, "pinched_torus.space"))
    assert code == 0 and out.strip() == "(Z, 0, Z)"
    X = load_space(os.path.join(SPACES, "cs1_squared.space"))
    assert X.dim == 4 and X.width == 2


def test_suite_subset(capsys, tmp_path):
    path = tmp_path / "suite.json"
    code, out, _ = run(capsys, "suite", "--only", "7,8", "--out", str(path))
    assert code == 0 and "cases passed" in out
    records = json.loads(path.read_text())
    assert records and all(r["passed"] for r in records)
    assert {r["criterion"] for r in records} == {7, 8}
