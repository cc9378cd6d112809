import subprocess
import sys

import pytest

from gen import FIXTURES
from udrs.cli import main
from udrs.sexpr import loads, loads_all


def f(name):
    return str(FIXTURES / f"{name}.udrs")


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_readings(capsys):
    code, out = run(capsys, "readings", f("ex15"))
    x = loads(out)
    assert code == 0 and x[:3] == ["readings", ":count", "2"]
    assert len([r for r in x if isinstance(r, list) and r[0] == "reading"]) == 2


def test_entail_exit_codes(capsys):
    assert run(capsys, "entail", "--rel", "r8", "--bound", "3", f("ex5b"), f("ex5b-goal"))[0] == 1
    code, out = run(capsys, "entail", "--rel", "r4", "--bound", "3", f("ex5b"), f("ex5b-goal"))
    assert code == 0 and ":holds yes" in " ".join(out.split())


def test_entail_with_model_directory(capsys, tmp_path):
    (tmp_path / "a.sexp").write_text((FIXTURES / "ex-model.sexp").read_text())
    code, out = run(capsys, "entail", "--models", str(tmp_path), f("ex5b"), f("ex5b-goal"))
    assert code == 1 and ":models 1" in " ".join(out.split())


def test_prove_and_replay(capsys, tmp_path):
    trace = tmp_path / "t.sexp"
    code, out = run(capsys, "prove", "--bound", "3", f("ex18"), f("ex18-goal"), "--trace", str(trace))
    assert code == 0 and loads(out)[1] == "proved"
    t = loads(trace.read_text())
    assert t[0] == "trace"
    code, out = run(capsys, "replay", "--bound", "3", f("ex18"), str(trace))
    assert code == 0 and ":match yes" in out


def test_replay_detects_tampering(capsys, tmp_path):
    trace = tmp_path / "t.sexp"
    run(capsys, "prove", "--bound", "3", f("ex18"), f("ex18-goal"), "--trace", str(trace))
    text = trace.read_text()
    digest = loads(text)[-1][-1]
    trace.write_text(text.replace(digest, "0" * len(digest)))
    assert run(capsys, "replay", "--bound", "3", f("ex18"), str(trace))[0] == 1


def test_prove_exhausted(capsys):
    assert run(capsys, "prove", "--bound", "3", "--budget", "3", f("ex16-few"), f("ex16-few-goal"))[0] == 2


def test_polarity_and_validate(capsys):
    code, out = run(capsys, "polarity", f("ex19e"))
    pol = {k: v for k, v in loads(out)[1:]}
    assert code == 0 and pol["l21"] == "-" and pol["l11"] == "+"
    code, out = run(capsys, "validate", f("ex18"))
    assert code == 0 and loads(out) == ["valid", ":entries", "2"]


def test_validate_reports_violation(capsys, tmp_path):
    p = tmp_path / "bad.udrs"
    p.write_text("""(udrs :top t (clause :upper t :lower l0
      (comp :label l1 (neg :body l11)) (comp :label l2 (neg :body l21))
      (base :label l0 ()) (ord (leq l1 (scope l2)) (leq l2 (scope l1)))))""")
    code, out = run(capsys, "validate", str(p))
    assert code == 1 and loads(out)[:4] == ["invalid", ":entry", "0", ":rule"]


def test_diff(capsys):
    code, out = run(capsys, "diff", f("diff3"))
    assert code == 0 and loads_all(out)[0][0] == "diff"
    assert run(capsys, "diff", f("diff3-same"))[0] == 1
    assert run(capsys, "diff", f("ex15"))[0] == 2


@pytest.mark.parametrize("argv", [
    ["readings", "/nonexistent.udrs"], ["bogus"], ["entail", "--rel", "r9", "a", "b"],
])
def test_input_errors(capsys, argv):
    assert main(argv) == 3


def test_syntax_error_is_input_error(capsys, tmp_path):
    p = tmp_path / "x.udrs"
    p.write_text("(udrs :top t (clause")
    assert main(["readings", str(p)]) == 3
    assert "line" in capsys.readouterr().err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "udrs", "readings", f("ex15")], capture_output=True, text=True)
    assert r.returncode == 0 and ":count 2" in " ".join(r.stdout.split())
