import csv
import io
import json
import subprocess
import sys

import pytest

from sgweyl import cli


def run(*argv):
    out = io.StringIO()
    rc = cli.main(list(argv), stdout=out)
    return rc, out.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eigs_family():
    rc, text = run("eigs", "--family", "3", "--count", "8")
    vals = [float(r["value"]) for r in rows(text)]
    assert rc == 0 and len(vals) == 8
    assert vals == sorted(vals) and len(set(vals)) == 8


def test_eigs_all_families():
    rc, text = run("eigs", "--all-families", "--count", "3")
    assert [r["family"] for r in rows(text)] == ["2"] * 3 + ["3"] * 3 + ["5"] * 3


def test_eigs_cycles():
    rc, text = run("eigs", "--cycles", "2")
    r = rows(text)
    assert len(r) == 21
    assert list(r[0]) == ["value", "cycle", "row", "mult_N", "mult_D", "mult_tilde", "label"]
    vals = [float(x["value"]) for x in r]
    assert vals == sorted(vals)


def test_output_is_deterministic_and_lf():
    a = run("eigs", "--cycles", "4")[1]
    b = run("eigs", "--cycles", "4")[1]
    assert a == b and "\r" not in a


def test_seventeen_digits():
    text = run("eigs", "--family", "3", "--count", "1")[1]
    value = rows(text)[0]["value"]
    assert value == "27.114425399157724"
    assert float(value) == 5 * float(__import__("sgweyl").decimation.psi(3.0))


@pytest.mark.parametrize("power,expected", [(2, 27), (3, 81)])
def test_count_at_eigenvalue(power, expected):
    rc, text = run("count", "--at-eigenvalue", "3,1", "--power", str(power))
    assert rc == 0 and int(rows(text)[0]["n_tilde"]) == expected


def test_count_tiny():
    r = rows(run("count", "1e-9")[1])[0]
    assert (r["n_neumann"], r["n_dirichlet"], r["n_tilde"]) == ("1", "0", "1")


def test_count_json():
    rc, text = run("count", "100", "--format", "json")
    assert json.loads(text)[0]["n_tilde"] == 6


def test_bad_input_exit_code(capsys):
    assert run("count")[0] == 2
    assert run("count", "--at-eigenvalue", "3")[0] == 2
    assert run("julia", "--depth", "30")[0] == 2
    assert "error" in capsys.readouterr().err


def test_verify_lemma():
    rc, text = run("verify", "lemma", "--n-max", "8", "--j-max", "3")
    doc = json.loads(text)
    assert rc == 0 and doc["passed"] and doc["suites"][0]["checks"] == 32


def test_verify_julia():
    rc, text = run("verify", "julia", "--depth", "25")
    doc = json.loads(text)
    assert rc == 0 and doc["suites"][0]["info"]["final_measure"] < 1e-5


def test_verify_failure_exit(monkeypatch):
    from sgweyl import verify

    def broken(*a, **k):
        rep = verify.SuiteReport("lemma", {})
        rep.check(False, "N~(25*5^j*lambda3_n) = 3^j * N~(25*lambda3_n)", n=1, j=0)
        return rep

    monkeypatch.setattr(verify, "lemma_suite", broken)
    rc, text = run("verify", "lemma")
    doc = json.loads(text)
    assert rc == 1
    assert doc["suites"][0]["failures"][0]["inputs"] == {"n": 1, "j": 0}


def test_weyl_export():
    r = rows(run("weyl", "--t-lo", "1", "--t-hi", "15625", "--samples", "20")[1])
    assert list(r[0]) == ["t", "weyl_ratio_tilde", "ratio_N", "ratio_D", "membership", "G", "G1"]
    assert len(r) == 20


def test_julia_exports():
    r = rows(run("julia", "--depth", "3")[1])
    assert len(r) == 8 and list(r[0]) == ["depth", "word", "lo", "hi", "length"]
    m = rows(run("julia", "--measures", "--depth", "4")[1])
    assert float(m[1]["measure"]) == pytest.approx(2.76393202250021)


def test_oracle_dump():
    rc, text = run("oracle", "--level", "2", "--condition", "free", "neumann")
    r = rows(text)
    assert rc == 0
    assert list(r[0]) == ["level", "space", "condition", "eigenvalue", "multiplicity", "closure_status"]
    free2 = [x for x in r if x["condition"] == "free" and x["level"] == "2"]
    assert sum(int(x["multiplicity"]) for x in free2) == 27


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"format": "json", "output_dir": str(tmp_path / "out")}))
    assert run("count", "100", "--config", str(cfg))[0] == 0
    assert json.loads((tmp_path / "out" / "count.json").read_text())[0]["n_tilde"] == 6
    assert run("count", "100", "--config", str(cfg), "--format", "csv")[0] == 0
    assert (tmp_path / "out" / "count.csv").read_bytes().startswith(b"t,n_neumann")


def test_config_validation(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"psi_tol": -1}))
    assert run("count", "1", "--config", str(cfg))[0] == 2
    cfg.write_text(json.dumps({"nope": 1}))
    assert run("count", "1", "--config", str(cfg))[0] == 2


def test_module_entry():
    out = subprocess.run([sys.executable, "-m", "sgweyl", "count", "1e-9"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.splitlines()[1].endswith(",1,0,1,false")
