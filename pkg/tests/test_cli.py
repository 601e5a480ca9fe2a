import json

import pytest
from click.testing import CliRunner

from depcalc.cli import main


@pytest.fixture
def run(tmp_path):
    runner = CliRunner()

    def go(*args, files=None):
        for name, text in (files or {}).items():
            (tmp_path / name).write_text(text)
        argv = [str(tmp_path / a) if files and a in files else a for a in args]
        return runner.invoke(main, argv)

    return go


def payload(result):
    return json.loads(result.output)


def test_check_prints_the_judgement(run):
    r = run("--calc", "gmc", "check", "j.dep", files={"j.dep": "var x : A\nterm ret x"})
    assert r.exit_code == 0
    assert "S[Public] A" in r.output


def test_check_json_and_failures(run):
    r = run("--json", "--calc", "gmc", "check", "j.dep", files={"j.dep": "ret unit"})
    assert r.exit_code == 0 and payload(r)["type"] == "S[Public] Unit"
    r = run("--json", "--calc", "gmc", "check", "bad.dep", files={"bad.dep": "extr unit"})
    assert r.exit_code == 1 and payload(r)["ok"] is False
    r = run("check", "broken.dep", files={"broken.dep": "term (unit"})
    assert r.exit_code == 2
    r = run("check", "/nonexistent/file.dep")
    assert r.exit_code == 2


def test_unknown_grade_is_an_input_error(run):
    r = run("check", "g.dep", files={"g.dep": "eta[Hidden] unit"})
    assert r.exit_code == 2


def test_translate(run):
    src = {"j.dep": "var x : S[l3] A\nterm fork[l11,l12] x"}
    r = run("--json", "--algebra", "diamond", "--calc", "gmcc", "translate", "--to", "dcce", "j.dep", files=src)
    assert r.exit_code == 0
    assert payload(r)["type"] == "S[l11] S[l12] A"
    assert payload(r)["term"].startswith("bind[l3]")
    r = run("--algebra", "diamond", "translate", "--from", "gmcc", "--to", "gmcce", "j.dep", files=src)
    assert r.exit_code == 0 and "split" in r.output
    r = run("translate", "--from", "lcirc", "--to", "dcce", "j.dep", files=src)
    assert r.exit_code == 2


def test_translate_staged(run):
    r = run("--json", "--algebra", "nat", "--calc", "lcirc", "translate", "--to", "gmcce", "j.dep",
            files={"j.dep": "var x @ 1 : A\nterm next x"})
    assert r.exit_code == 0
    assert payload(r)["term"] == "split[1] x"


def test_erase(run):
    r = run("erase", "j.dep", files={"j.dep": "var x : T[Secret] A\nterm bind[Secret] y = x in eta[Secret] y"})
    assert r.exit_code == 0
    assert "bind" not in r.output and "eta" not in r.output


def test_eq(run):
    files = {"a.dep": "var a : A\nterm up[Public,Secret] (ret a)", "b.dep": "var a : A\nterm a",
             "c.dep": "var a : A\nterm (a, a)"}
    r = run("--json", "eq", "a.dep", "b.dep", files=files)
    assert r.exit_code == 0 and payload(r)["verdict"] == "EqualUpToErasure"
    r = run("eq", "b.dep", "c.dep", files=files)
    assert r.exit_code == 1


def test_eval(run):
    files = {"j.dep": "bind[Secret] x = eta[Secret] true in eta[Secret] x"}
    r = run("--json", "--calc", "dcce", "eval", "j.dep", files=files)
    assert r.exit_code == 0 and payload(r)["value"] == "eta[Secret] true"
    r = run("--calc", "dcce", "eval", "--trace", "j.dep", files=files)
    assert r.exit_code == 0 and len(r.output.strip().splitlines()) == 2


def test_ni_single_check(run):
    files = {"f.dep": r"\x:T[Secret] Bool. true", "a1.dep": "eta[Secret] true",
             "a2.dep": "eta[Secret] false"}
    r = run("--calc", "dcce", "ni", "--level", "Secret", "f.dep", "a1.dep", "a2.dep", files=files)
    assert r.exit_code == 0 and r.output.startswith("PASS")
    r = run("--calc", "dcce", "ni", "f.dep", "a1.dep", "a2.dep", files=files)
    assert r.exit_code == 2
    r = run("--calc", "dcce", "ni", "f.dep", "a1.dep", files=files)
    assert r.exit_code == 2


def test_ni_fuzz(run, tmp_path):
    r = run("--json", "--calc", "dcce", "--trials", "30", "ni", "--out", str(tmp_path / "out"))
    assert r.exit_code == 0 and payload(r)["ok"]
    assert (tmp_path / "out" / "ni_dcce_l2.json").exists()
    r = run("--calc", "lcirc", "--algebra", "nat", "--trials", "30", "ni")
    assert r.exit_code == 0


def test_roundtrip(run):
    r = run("--json", "--trials", "20", "roundtrip")
    assert r.exit_code == 0 and payload(r)["terms"] == 20
    r = run("--algebra", "diamond", "roundtrip", "j.dep", files={"j.dep": "var x : S[l3] A\nterm fork[l11,l12] x"})
    assert r.exit_code == 0 and "Equal" in r.output


def test_oracle_commands(run):
    r = run("--json", "--algebra", "diamond", "oracle", "protect", "l3", "T[l11] T[l12] A")
    assert r.exit_code == 0 and payload(r)["derivable"] is True
    r = run("--json", "--algebra", "diamond", "oracle", "protect", "--mode", "plain", "l3", "T[l11] T[l12] A")
    assert r.exit_code == 0 and payload(r)["derivable"] is False
    r = run("--json", "--calc", "gmc", "oracle", "typing", "j.dep", files={"j.dep": "ret unit"})
    assert r.exit_code == 0 and payload(r)["types"] == ["S[Public] Unit"]
    r = run("--calc", "gmc", "oracle", "typing", "bad.dep", files={"bad.dep": "extr unit"})
    assert r.exit_code == 1


def test_validate_algebra(run):
    r = run("validate-algebra")
    assert r.exit_code == 0
    rows = "\n".join(f"op {a} {b} = {(int(a) + int(b)) % 3}" for a in "012" for b in "012")
    bad = f"kind monoid\nelements 0 1 2\nunit 0\n{rows}\nleq 0 0\nleq 1 1\nleq 2 2\nleq 0 1\n"
    r = run("--json", "validate-algebra", "bad.alg", files={"bad.alg": bad})
    assert r.exit_code == 1
    assert any(v["law"] for v in payload(r)["violations"])
    r = run("--algebra", "bad.alg", "check", "j.dep", files={"bad.alg": bad, "j.dep": "unit"})
    assert r.exit_code == 2


def test_report(run, tmp_path):
    out = tmp_path / "rep"
    r = run("--trials", "5", "report", "--out", str(out))
    assert r.exit_code == 0
    names = {p.name for p in out.iterdir()}
    assert {"roundtrip.csv", "protection.csv", "ni.csv", "roundtrip.png"} <= names
