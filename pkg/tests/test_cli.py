import json
import os

import pytest

from herbrand.cli import main
from herbrand.proofcalc import check, load_derivation


def write_problem(tmp_path, text, name="problem.prob"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_prove_dp(tmp_path, capsys):
    path = write_problem(tmp_path, "formula: (?x. P(x)) | ~(?y. P(y))\n")
    code, out, _ = run(capsys, ["prove", path, "--method", "dp", "--max-order", "3"])
    assert code == 0
    assert "verdict: proof-found" in out
    assert "order: 2" in out
    assert "witness-verified: true" in out


def test_prove_invalid_prints_falsifying_structure(tmp_path, capsys):
    path = write_problem(tmp_path, "formula: ?x. P(x)\n")
    code, out, _ = run(capsys, ["prove", path, "--method", "dp", "--max-order", "2"])
    assert code == 1
    assert "verdict: gave-up" in out
    assert "domain:" in out
    assert "pred P:" in out


def test_prove_malformed_file(tmp_path, capsys):
    path = write_problem(tmp_path, "formula: P(x\n")
    code, _, err = run(capsys, ["prove", path])
    assert code == 2 and "error" in err


def test_free_declaration_convention(tmp_path, capsys):
    # undeclared identifiers are constants; declared ones are variables
    path = write_problem(tmp_path, "formula: P(x) | ~P(x)\n")
    code, out, _ = run(capsys, ["prove", path])
    assert code == 0
    path = write_problem(tmp_path, "free: x\nformula: P(x) | ~P(x)\n")
    code, out, _ = run(capsys, ["prove", path, "--method", "gilmore"])
    assert code == 0


def test_prove_proof_out_checks(tmp_path, capsys):
    path = write_problem(tmp_path, "formula: (!x. P(x)) -> P(c)\n")
    drv = str(tmp_path / "proof.drv")
    code, out, _ = run(
        capsys,
        ["prove", path, "--method", "resolution", "--proof-out", drv],
    )
    assert code == 0 and f"proof-out: {drv}" in out
    with open(drv, encoding="utf-8") as handle:
        d, _ = load_derivation(handle.read())
    assert check(d) is None

    code, out, _ = run(capsys, ["check", drv])
    assert code == 0 and "ok" in out


def test_prove_json_mode(tmp_path, capsys):
    path = write_problem(tmp_path, "formula: P(c) | ~P(c)\n")
    code, out, _ = run(capsys, ["prove", path, "--json"])
    assert code == 0
    record = json.loads(out)
    assert record["verdict"] == "proof-found"


def test_prove_race(tmp_path, capsys):
    path = write_problem(tmp_path, "formula: (?x. P(x)) | ~(?y. P(y))\n")
    code, out, _ = run(capsys, ["prove", path, "--method", "race"])
    assert code == 0 and "verdict: proof-found" in out


def test_deterministic_output(tmp_path, capsys):
    path = write_problem(tmp_path, "formula: (?x. P(x)) | ~(?y. P(y))\n")
    argv = ["prove", path, "--method", "dp", "--max-order", "3"]
    _, out1, _ = run(capsys, argv)
    _, out2, _ = run(capsys, argv)
    assert out1 == out2


def test_transform_passes(tmp_path, capsys):
    path = write_problem(tmp_path, "formula: (?x. P(x)) | ~(?y. P(y))\n")
    code, out, _ = run(capsys, ["transform", path, "--pass", "skolem-outer"])
    assert code == 0 and out.strip() == "(?x. P(x)) | ~P(y_star)"
    code, out, _ = run(capsys, ["transform", path, "--pass", "prenex"])
    assert code == 0 and out.strip() == "?x. !y. P(x) | ~P(y)"
    qfree = write_problem(tmp_path, "formula: P(c) -> Q(c)\n", "q.prob")
    code, out, _ = run(capsys, ["transform", qfree, "--pass", "prenex"])
    assert code == 0 and out.strip() == "P(c) -> Q(c)"
    code, _, err = run(capsys, ["transform", path, "--pass", "relativize"])
    assert code == 2 and "guard" in err
    code, out, _ = run(
        capsys, ["transform", path, "--pass", "relativize", "--guard", "D"]
    )
    assert code == 0 and "D(" in out


def test_expand_command(tmp_path, capsys):
    path = write_problem(tmp_path, "formula: (?x. P(x)) | ~(?y. P(y))\n")
    code, out, _ = run(capsys, ["expand", path, "-n", "2"])
    assert code == 0
    assert "champ: y_star" in out
    assert "expansion: P(y_star) | ~P(y_star)" in out


def test_complexity_command(tmp_path, capsys):
    path = write_problem(tmp_path, "formula: (?x. P(x)) | ~(?y. P(y))\n")
    code, out, _ = run(capsys, ["complexity", path, "-n", "2"])
    assert code == 0 and "complexity: 1" in out
    invalid = write_problem(tmp_path, "formula: ?x. P(x)\n", "inv.prob")
    code, out, _ = run(capsys, ["complexity", invalid, "-n", "2"])
    assert code == 1 and "complexity: none" in out


def test_unify_command(capsys):
    code, out, _ = run(
        capsys,
        ["unify", "Pq(x, f(a, y))", "Pq(a, f(z, b))", "--frees", "x y z"],
    )
    assert code == 0
    assert "status: success" in out
    assert "x -> a" in out and "y -> b" in out and "z -> a" in out
    code, out, _ = run(capsys, ["unify", "x", "f(x)", "--frees", "x"])
    assert code == 1 and "status: occurs" in out


def test_arith_command(capsys):
    code, out, _ = run(capsys, ["arith", "decide", "!x. S(x) != 0"])
    assert code == 0 and out.strip() == "derivable"
    code, out, _ = run(capsys, ["arith", "decide", "?x. S(x) = x"])
    assert code == 0 and out.strip() == "refutable"
    code, _, err = run(capsys, ["arith", "decide", "!x. P(x)"])
    assert code == 2


def test_eval_consumes_structure_files(tmp_path, capsys):
    # produce a falsifying structure with prove, feed it back through eval
    prob = write_problem(tmp_path, "formula: ?x. P(x)\n")
    code, out, _ = run(capsys, ["prove", prob, "--method", "dp", "--max-order", "2"])
    assert code == 1
    structure_text = out.split("falsifying-structure: \n", 1)[1]
    struct_path = tmp_path / "falsifier.struct"
    struct_path.write_text(structure_text, encoding="utf-8")
    code, out, _ = run(capsys, ["eval", str(struct_path), prob])
    assert code == 0 and out.strip() == "false"

    taut = write_problem(tmp_path, "formula: P(c) | ~P(c)\n", "t.prob")
    struct2 = tmp_path / "one.struct"
    struct2.write_text(
        "domain: e0\nfn c: ()->e0\npred P: (e0)->T\n", encoding="utf-8"
    )
    code, out, _ = run(capsys, ["eval", str(struct2), taut])
    assert code == 0 and out.strip() == "true"


def test_expectation_annotation(tmp_path, capsys):
    ok = write_problem(
        tmp_path, "formula: P(c) | ~P(c)\nexpect: proof-found\n", "ok.prob"
    )
    code, _, _ = run(capsys, ["prove", ok])
    assert code == 0
    wrong = write_problem(
        tmp_path, "formula: P(c) | ~P(c)\nexpect: gave-up\n", "wrong.prob"
    )
    code, _, err = run(capsys, ["prove", wrong])
    assert code == 2 and "expectation failed" in err


def test_selftest(capsys):
    code, out, _ = run(capsys, ["selftest"])
    assert code == 0
    assert "all checks passed" in out
    assert "FAIL" not in out
