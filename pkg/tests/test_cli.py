import json
import subprocess
import sys

import pytest

from cdk.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err.strip()


def test_diff(capsys):
    code, out, _ = run(capsys, "diff", "map (x,y) -> (x*y, sin(x))")
    assert code == 0
    assert out == "map ((x, y), x', y') -> (x*y' + y*x', x'*cos(x))"


def test_printed_derivative_reparses(capsys):
    from cdk.syntax import parse_map
    _, out, _ = run(capsys, "diff", "map (a, (b, c)) -> (a*b - c^2)")
    f = parse_map(out)
    assert f.dom.dim == 6


def test_partial_and_slice(capsys):
    assert run(capsys, "partial-diff", "map (c, x) -> (c*x^2)")[1] == "map (c, x, x') -> (2*c*x*x')"
    code, out, _ = run(capsys, "slice-diff", "map (c, x) -> (c*x)", "map (c, y) -> (y^2 + c)")
    assert code == 0 and out == "map (c, x, x') -> (2*c^2*x*x')"
    assert run(capsys, "partial-diff", "map (x) -> (x)")[0] == 2


def test_compose_and_eval(capsys):
    assert run(capsys, "compose", "map (x) -> (x^2)", "map (y) -> (y + 1)")[1] == "map (x) -> (x^2 + 1)"
    assert run(capsys, "eval", "map (x, y) -> (x*y)", "1/2, 3")[1] == "(3/2)"
    assert run(capsys, "eval", "map (x) -> (exp(x))", "0")[1] == "(1.0)"
    code, _, err = run(capsys, "eval", "map (x, y) -> (x)", "1")
    assert code == 2 and "coordinates" in err


def test_vf_compose(capsys):
    code, out, _ = run(capsys, "vf-compose", "map (x) -> (x, x^2)", "map (x) -> (x, x^3)")
    assert code == 0 and out == "map (x) -> (x, x^3 + x^2 + 3*x^4)"
    _, out, _ = run(capsys, "vf-compose", "--normal-form", "map (x) -> (x, x^2)", "map (x) -> (x, x^3)")
    assert out == "map (x) -> (x, 3*x^4 + x^3 + x^2)"


def test_parse_error_exit_code(capsys):
    code, out, err = run(capsys, "diff", "map (x -> x")
    assert code == 2 and out == ""
    assert "line 1, column 8" in err


def test_usage_errors(capsys):
    assert run(capsys, "check", "all", "--monad", "reader")[0] == 2
    assert run(capsys, "check", "nothing")[0] == 2
    assert run(capsys, "check", "cdc", "--trials", "0")[0] == 2
    assert run(capsys)[0] == 2


def test_check_all_json(capsys):
    code, out, _ = run(capsys, "check", "all", "--monad", "tangent", "--seed", "42", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True and set(doc) == {"suite", "passed", "cases", "stages"}
    assert {"axiom", "trial", "ok", "witness", "residual", "seed"} <= set(doc["cases"][0])


def test_check_is_reproducible(capsys):
    a = run(capsys, "check", "kd", "--seed", "9", "--trials", "2", "--json")[1]
    b = run(capsys, "check", "kd", "--seed", "9", "--trials", "2", "--json")[1]
    assert a == b


@pytest.mark.parametrize("target", ["cdc", "monad", "kleisli", "abstract", "kd", "em"])
def test_check_targets(capsys, target):
    code, out, _ = run(capsys, "check", target, "--monad", "identity", "--trials", "2", "--exact")
    assert code == 0 and "PASS" in out


def test_console_script_module():
    out = subprocess.run([sys.executable, "-m", "cdk.cli", "diff", "map (x) -> (x^2)"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "map (x, x') -> (2*x*x')"


def test_failing_suite_exit_code(capsys, monkeypatch):
    from cdk import cli
    from cdk.monads import mutant_mu_forget
    monkeypatch.setattr(cli, "get_monad", lambda name: mutant_mu_forget())
    code, out, _ = run(capsys, "check", "monad", "--trials", "2")
    assert code == 1 and "FAIL" in out and "unit_right" in out
