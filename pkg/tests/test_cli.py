import json
import subprocess
import sys

import pytest

from annihilant.cli import ProblemSpec, UsageError, main, run_batch, run_problem
from annihilant.formatting import from_json
from annihilant.operators import make_laplacian
from annihilant.parsing import parse

HELMHOLTZ_Q = "x1^4*x2^3/nu - (6*x1^4*x2 + 12*x1^2*x2^3)/nu^2 + (144*x1^2*x2 + 24*x2^3)/nu^3 - 432*x2/nu^4"

SAMPLE_PROBLEMS = [
    {"equation": "wave", "c": "c", "rhs": "t*sin(t)*x1^2*x2"},
    {"equation": "poisson", "n": 2, "rhs": "x1^2*x2^10"},
    {"equation": "polyharmonic", "n": 2, "k": 3, "rhs": "x1^2*sin(x2)"},
]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err.strip()


def test_solve_poisson(capsys):
    code, out, _ = run(capsys, "solve", "--equation", "poisson", "--n", "2", "--rhs", "x1^2*x2^10")
    assert code == 0
    assert out == "(91*x1^2*x2^12 - x2^14)/12012"


def test_solve_helmholtz(capsys):
    code, out, _ = run(capsys, "solve", "--equation", "helmholtz", "--n", "2", "--k", "1", "--j", "1",
                       "--nu", "nu", "--rhs", "x1^4*x2^3")
    assert code == 0
    assert parse(out, 2, ["nu"]) == parse(HELMHOLTZ_Q, 2, ["nu"])
    assert out == HELMHOLTZ_Q


def test_solve_out_of_class(capsys):
    code, out, err = run(capsys, "solve", "--equation", "poisson", "--n", "2", "--rhs", "sin(x1)*exp(x2^2)")
    assert code == 2 and out == ""
    assert "unsupported inhomogeneity" in err


def test_solve_unsupported_term(capsys):
    code, _out, err = run(capsys, "solve", "--equation", "poisson", "--rhs", "x1*exp(x1)*sin(x2)*x2")
    assert code == 2 and "unsupported inhomogeneity" in err


@pytest.mark.parametrize("argv", [
    ["solve", "--equation", "poisson", "--rhs", "x1 +"],
    ["solve", "--equation", "poisson", "--nu", "2", "--rhs", "x1"],
    ["solve", "--equation", "helmholtz", "--rhs", "x1"],
    ["solve", "--equation", "nope", "--rhs", "x1"],
    ["solve", "--equation", "generalized", "--weights", "1,0", "--rhs", "x1"],
    ["solve", "--equation", "poisson", "--n", "0", "--rhs", "x1"],
])
def test_usage_errors(capsys, argv):
    code, _out, _err = run(capsys, *argv)
    assert code == 1


def test_json_output_round_trips(capsys):
    code, out, _ = run(capsys, "solve", "--equation", "wave", "--c", "c", "--rhs", "t*sin(t)*x1^2*x2",
                       "--output", "json", "--points", "3")
    assert code == 0
    record = json.loads(out)
    assert record["status"] == "ok"
    assert record["report"]["symbolic_zero"] and record["report"]["passed"]
    Q = from_json(record["Q"])
    assert Q == parse("c^2*x1^2*x2*(-2*cos(t) - t*sin(t)) + 2*c^4*x2*(4*cos(t) + t*sin(t))", 2, ["c"])


def test_latex_output(capsys):
    code, out, _ = run(capsys, "solve", "--equation", "poisson", "--rhs", "x1^2*x2^10", "--output", "latex")
    assert code == 0 and out.startswith(r"\frac{")


def test_generalized_and_forced_m(capsys):
    code, out, _ = run(capsys, "solve", "--equation", "generalized", "--weights", "1/c^2,-1,-1,-1",
                       "--rhs", "t*sin(t)*x1^2*x2")
    assert code == 1  # generalized weights cover x1..xn, not time
    code, out, _ = run(capsys, "solve", "--equation", "generalized", "--weights", "2,-1/3",
                       "--k", "2", "--rhs", "x1^3*x2^2")
    assert code == 0
    code, out, _ = run(capsys, "solve", "--equation", "poisson", "--forced-m", "x1", "--rhs", "x1^2*x2^10")
    assert code == 0 and out.startswith("-(x1^14")


def test_leading_minus_expression(capsys):
    code, out, _ = run(capsys, "solve", "--equation", "poisson", "--rhs", "-x1*x2", "--nu", "-2")
    assert code == 1  # nu is not a poisson flag, but the values still parse as values
    code, out, _ = run(capsys, "solve", "--equation", "poisson", "--rhs", "-x1*x2")
    assert code == 0 and parse(out, 2) == parse("-x1^3*x2/6", 2)


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--rhs", "-x2; x1")
    assert code == 0
    assert "g = [0; 0]" in out and "r = [-x2; x1]" in out
    code, out, _ = run(capsys, "decompose", "--rhs", "x2; 0", "--output", "json")
    record = json.loads(out)
    assert [from_json(c) for c in record["r"]] == [parse("x2", 2), parse("0", 2)]
    assert set(record) >= {"phi", "F", "G", "R", "g", "r"}


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--candidate", "(91*x1^2*x2^12 - x2^14)/12012", "--rhs", "x1^2*x2^10")
    assert code == 0
    assert json.loads(out) == {"symbolic_zero": True, "numeric_max": json.loads(out)["numeric_max"],
                               "points": 10, "passed": True}
    code, out, _ = run(capsys, "verify", "--candidate", "x1^2", "--rhs", "x1^2")
    assert code == 2 and json.loads(out)["symbolic_zero"] is False


def test_verify_operator_json(capsys):
    op = json.dumps(make_laplacian(2).to_json())
    code, out, _ = run(capsys, "verify", "--operator-json", op, "--candidate", "x1^2/2", "--rhs", "1")
    assert code == 0


def test_verify_wave_with_bound_parameter(capsys):
    code, out, _ = run(capsys, "verify", "--equation", "wave", "--c", "c", "--param", "c=3/2",
                       "--candidate", "c^2*x1^2*x2*(-2*cos(t) - t*sin(t)) + 2*c^4*x2*(4*cos(t) + t*sin(t))",
                       "--rhs", "t*sin(t)*x1^2*x2")
    assert code == 0 and json.loads(out)["passed"]


def test_seed_environment_override(monkeypatch):
    spec = ProblemSpec("wave", c="c", rhs="t*sin(t)*x1^2*x2", points=2)
    monkeypatch.setenv("ANNIHILANT_SEED", "17")
    from annihilant.cli import _spec_from_args, build_parser
    args = build_parser().parse_args(["solve", "--equation", "poisson", "--rhs", "x1", "--seed", "3"])
    assert _spec_from_args(args).seed == 17
    assert run_problem(spec)["report"].passed


def test_problem_spec_validation():
    with pytest.raises(UsageError):
        ProblemSpec.from_dict({"rhs": "x1"})
    with pytest.raises(UsageError):
        ProblemSpec.from_dict({"equation": "poisson", "rhs": "x1", "bogus": 1})
    with pytest.raises(UsageError):
        run_problem(ProblemSpec.from_dict({"equation": "poisson", "rhs": "x1", "weights": "1,1"}))


def test_batch_appendix(tmp_path, capsys):
    path = tmp_path / "problems.jsonl"
    path.write_text("\n".join(json.dumps(p) for p in SAMPLE_PROBLEMS) + "\n")
    assert run_batch(str(path)) == 0
    lines = [json.loads(ln) for ln in capsys.readouterr().out.splitlines()]
    assert [ln["status"] for ln in lines] == ["ok", "ok", "ok"]
    assert all(ln["report"]["symbolic_zero"] for ln in lines)
    assert from_json(lines[2]["Q"]) == parse("-sin(x2)*(x1^2 + 6)", 2)


def test_batch_empty(tmp_path, capsys):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    assert run_batch(str(path)) == 0
    assert capsys.readouterr().out == ""


def test_batch_error_isolation(tmp_path, capsys):
    path = tmp_path / "mixed.jsonl"
    lines = [json.dumps(SAMPLE_PROBLEMS[1]), "{not json", json.dumps({"equation": "poisson", "rhs": "exp(x1^2)"}),
             json.dumps(SAMPLE_PROBLEMS[2])]
    path.write_text("\n".join(lines))
    assert run_batch(str(path), jobs=2) == 2
    out = [json.loads(ln) for ln in capsys.readouterr().out.splitlines()]
    assert [r["status"] for r in out] == ["ok", "error", "unsupported", "ok"]


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "annihilant.cli", "solve", "--equation", "polyharmonic",
                           "--k", "2", "--rhs", "x1^2*sin(x2)"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert parse(proc.stdout.strip(), 2) == parse("sin(x2)*(x1^2 + 4)", 2)
