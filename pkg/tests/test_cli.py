import json
from pathlib import Path

import pytest

from ncship import formats
from ncship.cli import main
from ncship.hochcyc import validate_negative_cocycle
from ncship.novikov import parse_rational
from ncship.ncgeom import FormSpace, pullback_by_cohom
from ncship.sympeq import ConstantTwoForm

FIX = Path(__file__).resolve().parent.parent / "fixtures"


def run(capsys, *args):
    with pytest.raises(SystemExit) as exc:
        main([str(a) for a in args])
    out = capsys.readouterr().out
    return exc.value.code, out


def report(capsys, *args):
    code, out = run(capsys, *args)
    doc = json.loads(out)
    assert doc["exit_code"] == code
    return code, doc


@pytest.mark.parametrize("name", ["s2", "cp2", "qs2", "s2_trivial_monoid"])
def test_check_fixtures_pass(capsys, name):
    code, doc = report(capsys, "check", FIX / (name + ".json"))
    assert code == 0
    assert [c["name"] for c in doc["checks"]] == ["gapped", "ainfty", "unit", "cyclicity"]
    assert all(c["status"] == "pass" for c in doc["checks"])


def test_broken_product_names_its_witness(capsys, tmp_path):
    doc = json.loads((FIX / "s2.json").read_text())
    doc["ops"].append({"inputs": ["t", "u"], "outputs": {"t": "1"}})
    doc["ops"][1]["outputs"] = {"t": "2"}
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    code, rep = report(capsys, "check", p)
    assert code == 1
    ainf = next(c for c in rep["checks"] if c["name"] == "ainfty")
    assert ainf["status"] == "fail" and ainf["witness"]["word"]


def test_schema_error_names_the_place(capsys, tmp_path):
    doc = json.loads((FIX / "s2.json").read_text())
    doc["ops"][2]["outputs"] = {"t": "one"}
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    code, rep = report(capsys, "check", p)
    assert code == 4 and rep["verdict"] == "input"
    assert "ops/2" in rep["error"]["message"]


def test_degree_error_names_the_operation(capsys, tmp_path):
    doc = json.loads((FIX / "s2.json").read_text())
    doc["ops"].append({"inputs": ["t", "t"], "outputs": {"t": "1"}})
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    code, rep = report(capsys, "check", p)
    assert code == 4 and "m(t,t)" in rep["error"]["message"]


def test_invalid_json_reports_position(capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{\n  \"schema\": 1,\n")
    code, rep = report(capsys, "check", p)
    assert code == 4 and "line" in rep["error"]["message"]


def test_missing_file_and_unknown_flag(capsys):
    assert run(capsys, "check", FIX / "nope.json")[0] == 4
    assert run(capsys, "check", FIX / "s2.json", "--bogus")[0] == 4


def test_tilde_pairing_cocycle(capsys, tmp_path):
    out = tmp_path / "psi.json"
    code, rep = report(capsys, "tilde", FIX / "s2.json", FIX / "s2_pairing_cocycle.json",
                       "--output", out)
    assert code == 0
    assert rep["payload"]["gram"] == [["0", "1"], ["1", "0"]]
    psi = formats.bimodmap_from_doc(json.loads(out.read_text()), ["u", "t"])
    assert psi


def test_tilde_zero_cocycle_is_degenerate(capsys):
    code, rep = report(capsys, "tilde", FIX / "s2.json", FIX / "zero_cocycle.json")
    assert code == 1
    nd = next(c for c in rep["checks"] if c["name"] == "nondegenerate")
    assert nd["status"] == "fail"


def test_tilde_rejects_non_cocycles_unless_forced(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"schema": 1, "entries": [
        {"inputs": ["u"], "output": "u", "c": "1"}]}))
    code, rep = report(capsys, "tilde", FIX / "s2.json", p)
    assert code == 2 and "--force" in rep["error"]["message"]
    code, rep = report(capsys, "tilde", FIX / "s2.json", p, "--force")
    assert code == 1
    assert rep["checks"][0]["name"] == "cocycle" and rep["checks"][0]["status"] == "fail"


def test_seeded_tilde_is_reproducible_and_reverifiable(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    c1, out1 = run(capsys, "tilde", FIX / "cp2.json", "--seed", 3, "--order", 5, "--output", a)
    c2, out2 = run(capsys, "tilde", FIX / "cp2.json", "--seed", 3, "--order", 5, "--output", b)
    assert c1 == c2 == 0 and out1 == out2 and a.read_bytes() == b.read_bytes()
    alg = formats.load_algebra(FIX / "cp2.json", 5)
    doc = json.loads(a.read_text())
    cols = formats.cochains_from_doc({"schema": 1, "columns": doc["cocycle"]}, alg)
    assert validate_negative_cocycle(alg.base, cols, 5)["valid"]


def test_equivalence_exit_codes(capsys, tmp_path):
    out = tmp_path / "cert.json"
    code, rep = report(capsys, "equivalence", FIX / "s2.json", FIX / "s2_eta.json",
                       "--order", 6, "--output", out)
    assert code == 0 and rep["verdict"] == "pass"
    cert = json.loads(out.read_text())
    assert set(cert["verdicts"].values()) == {"pass"}
    formats.cohom_from_doc(cert, ["u", "t"])
    assert report(capsys, "equivalence", FIX / "s2.json", FIX / "s2_eta_tt.json",
                  "--order", 6)[0] == 2
    assert report(capsys, "equivalence", FIX / "qs2.json", FIX / "qs2_eta.json",
                  "--order", 6)[0] == 0
    assert report(capsys, "equivalence", FIX / "qs2.json", FIX / "qs2_eta_negative.json",
                  "--order", 6)[0] == 2


def test_darboux_output_reverifies(capsys, tmp_path):
    out = tmp_path / "F.json"
    code, rep = report(capsys, "darboux", FIX / "s2_form_perturbed.json", "--order", 6,
                       "--output", out)
    assert code == 0
    ff = formats.load_form(FIX / "s2_form_perturbed.json", 6)
    F = formats.cohom_from_doc(json.loads(out.read_text()), ff.ids())
    const = ConstantTwoForm([[parse_rational(c) for c in row]
                             for row in rep["payload"]["constant_form"]], ff.degrees())
    sp = FormSpace(ff.degrees(), 6)
    assert pullback_by_cohom(F, ff.form()) == const.form(sp)


def test_darboux_negative_energy_is_obstruction(capsys):
    before = (FIX / "qs2_form_negative.json").read_bytes()
    code, rep = report(capsys, "darboux", FIX / "qs2_form_negative.json", "--order", 6)
    assert code == 3 and rep["verdict"] == "obstruction"
    det = rep["error"]["details"]
    assert det["minimal_negative_exponent"] == "-1"
    assert all(tok.startswith(("dx:", "x:")) for tok in det["offending_term"]["word"])
    assert (FIX / "qs2_form_negative.json").read_bytes() == before


def test_text_format(capsys):
    code, out = run(capsys, "tilde", FIX / "s2.json", FIX / "zero_cocycle.json",
                    "--format", "text")
    assert code == 1
    assert "nondegenerate    fail" in out and out.rstrip().endswith("(exit 1)")
