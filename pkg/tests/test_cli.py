import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from wavecraft.cli import EXIT_BALANCE, EXIT_FAIL, EXIT_INPUT, EXIT_NO_SOLUTION, EXIT_OK, EXIT_TOO_HARD, main

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


@pytest.fixture(scope="module")
def fisher_json():
    code, out, _ = run("solve", PROBLEMS / "fisher.nlpde", "--method", "ffx", "--output", "json")
    assert code == EXIT_OK
    return out


def test_fisher_json(fisher_json):
    doc = json.loads(fisher_json)
    assert doc["method"] == "ffx"
    assert len(doc["branches"]) == 2
    for br in doc["branches"]:
        assert set(br) >= {"assignments", "closed_form", "case", "residual"}
        assert br["assignments"]["b2"]["exact"] == "6"
        assert br["residual"]["max"] < 1e-10
        assert set(br["residual"]["grid"]) == {"interval", "points"}
    speeds = {br["assignments"]["c"]["exact"] for br in doc["branches"]}
    assert speeds == {"5/6*sqrt(6)", "-5/6*sqrt(6)"}
    assert "diagnostics" in doc and doc["diagnostics"]["degree"] == 2


def test_json_is_deterministic(fisher_json):
    again = run("solve", PROBLEMS / "fisher.nlpde", "--method", "ffx", "--output", "json")[1]
    assert again == fisher_json


def test_verify_round_trip(tmp_path, fisher_json):
    sol = write(tmp_path, "fisher.json", fisher_json)
    code, out, _ = run("verify", PROBLEMS / "fisher.nlpde", sol)
    assert code == EXIT_OK
    assert out.count("(pass)") == 2


def test_verify_detects_tampering(tmp_path, fisher_json):
    doc = json.loads(fisher_json)
    doc["branches"][0]["closed_form"]["bindings"]["c"]["exact"] = "2"
    sol = write(tmp_path, "bad.json", json.dumps(doc))
    code, out, _ = run("verify", PROBLEMS / "fisher.nlpde", sol)
    assert code == EXIT_FAIL and "FAIL" in out


@pytest.mark.parametrize("method", ["riccati", "expfn"])
def test_other_methods(method):
    code, out, _ = run("solve", PROBLEMS / "fisher.nlpde", "--method", method)
    assert code == EXIT_OK
    assert "5/6*sqrt(6)" in out


def test_direction_flag():
    code, out, _ = run("solve", PROBLEMS / "fisher.nlpde", "--direction", "-")
    assert code == EXIT_OK
    assert "u'' - c*u'" in out


def test_latex_output():
    code, out, _ = run("solve", PROBLEMS / "fisher.nlpde", "--output", "latex")
    assert code == EXIT_OK
    assert out.count("\\begin{align*}") == 2


def test_bratu_file_via_expfn(tmp_path):
    code, out, _ = run("solve", PROBLEMS / "bratu.nlpde", "--method", "expfn", "--output", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    (br,) = doc["branches"]
    assert br["assignments"]["lambda"]["exact"] == "8*alpha^2*exp(2*alpha)/(1 + exp(2*alpha))^2"
    sol = write(tmp_path, "bratu.json", out)
    assert run("verify", PROBLEMS / "bratu.nlpde", sol)[0] == EXIT_OK


def test_bvp_needs_expfn():
    assert run("solve", PROBLEMS / "bratu.nlpde", "--method", "ffx")[0] == EXIT_INPUT


def test_linear_equation_is_a_balance_failure():
    code, _, err = run("solve", PROBLEMS / "linear.nlpde", "--method", "ffx")
    assert code == EXIT_BALANCE and "balance" in err


def test_no_exact_solution(tmp_path):
    p = write(tmp_path, "cubic.nlpde", "func u(x)\neq: u'' + u^3 = 0\n")
    code, _, err = run("solve", p, "--method", "riccati")
    assert code == EXIT_NO_SOLUTION and "complex" in err


def test_parse_errors(tmp_path):
    p = write(tmp_path, "bad.nlpde", "func u(x, t)\neq: u_t = u^^2\n")
    code, _, err = run("solve", p)
    assert code == EXIT_INPUT and "line 2" in err
    assert run("solve", tmp_path / "missing.nlpde")[0] == EXIT_INPUT
    assert run("solve", PROBLEMS / "fisher.nlpde", "--ranges", "1,2")[0] == EXIT_INPUT
    assert run("solve", PROBLEMS / "fisher.nlpde", "--method", "bogus")[0] == EXIT_INPUT
    assert run("verify", PROBLEMS / "fisher.nlpde", write(tmp_path, "x.json", "{not json"))[0] == EXIT_INPUT


def test_too_hard(tmp_path):
    p = write(tmp_path, "hard.nlpde", "eq: u_t = u_xx + u - 3*u^2 + u^3\n")
    code, _, err = run("solve", p, "--method", "expfn", "--ranges", "1,1,1,1")
    assert code == EXIT_TOO_HARD and "gave up" in err


def test_demo_bratu():
    code, out, _ = run("demo", "bratu")
    assert code == EXIT_OK
    assert "alpha_c = 1.19967864" in out
    assert "lambda_c = 0.87845768" in out


def test_demo_fisher():
    code, out, _ = run("demo", "fisher")
    assert code == EXIT_OK
    assert out.count("True") == 4 and "False" not in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wavecraft", "demo", "bratu"], capture_output=True, text=True)
    assert proc.returncode == 0 and "lambda_c" in proc.stdout
