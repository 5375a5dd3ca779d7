from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from qwz.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def quarter_file(tmp_path, capsys):
    path = tmp_path / "quarter.json"
    code, out, _ = run(capsys, "derive", "--family", "quarter", "--params", "1/2,1/2,2,2",
                       "--format", "json", "-o", str(path))
    assert code == 0
    return path


def test_derive_then_certify(quarter_file, capsys):
    data = json.loads(quarter_file.read_text())
    assert data["family"] == "quarter"
    assert "tag" in data["provenance"]
    code, out, _ = run(capsys, "certify", str(quarter_file))
    assert code == 0
    assert "residual: 0" in out


def test_derive_text_to_stdout(capsys):
    code, out, _ = run(capsys, "derive", "--family", "neg-quarter", "--params", "1,1,2,2")
    assert code == 0
    assert out.startswith("family     neg-quarter")
    assert "Rbar" in out


def test_derive_degenerate_exit_code(capsys):
    code, _, err = run(capsys, "derive", "--family", "quarter", "--params", "0,1,2,2")
    assert code == 2
    assert "degenerate" in err


def test_derive_bad_params_usage(capsys):
    code, _, err = run(capsys, "derive", "--family", "quarter", "--params", "1,2,3")
    assert code == 1
    assert "four" in err


def test_schema_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"family": "quarter"}))
    code, _, err = run(capsys, "certify", str(bad))
    assert code == 5
    assert "schema" in err
    code, _, _ = run(capsys, "certify", str(tmp_path / "missing.json"))
    assert code == 5


def test_tampered_certificate_exit_code(quarter_file, capsys):
    data = json.loads(quarter_file.read_text())
    data["certificate"]["Rbar"] = "(1*t^0*X^1*K^0)/(1*t^0*X^0*K^0)"
    quarter_file.write_text(json.dumps(data))
    code, out, err = run(capsys, "certify", str(quarter_file))
    assert code == 4
    assert "residual: 0" not in out


def test_verify_two_points(quarter_file, capsys):
    code, out, _ = run(capsys, "verify", str(quarter_file), "--q", "2", "--q", "1.25",
                       "--format", "json", "--strict")
    assert code == 0
    rows = json.loads(out)
    assert [r["q"] for r in rows] == ["2", "5/4"]
    assert all(r["verdict"] == "pass" for r in rows)


def test_verify_outside_domain(quarter_file, capsys):
    code, out, _ = run(capsys, "verify", str(quarter_file), "--q", "1/2")
    assert code == 0
    assert "fail" in out
    code, _, _ = run(capsys, "verify", str(quarter_file), "--q", "1/2", "--strict")
    assert code == 1


def test_limit(capsys):
    code, out, _ = run(capsys, "limit", "apery", "--format", "json", "--strict")
    assert code == 0
    assert json.loads(out)["verdict"] == "pass"
    code, _, err = run(capsys, "limit", "no-such-entry")
    assert code == 1


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog", "list", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) >= 30
    assert len({r["tag"] for r in rows}) == len(rows)


def test_catalog_run_subset(capsys):
    code, out, _ = run(capsys, "catalog", "run", "--tags", "ramanujan4,bbp", "--digits", "30", "--strict")
    assert code == 0
    assert "2/2 entries pass" in out
    code, _, err = run(capsys, "catalog", "run", "--tags", "nonsense")
    assert code == 1


def test_export_latex(capsys, tmp_path):
    code, out, _ = run(capsys, "export", "--tag", "apery", "--format", "latex")
    assert code == 0
    assert "\\sum" in out
    target = tmp_path / "apery.tex"
    code, _, _ = run(capsys, "export", "--tag", "apery", "-o", str(target))
    assert code == 0 and target.read_text() == out
    code, _, _ = run(capsys, "export")
    assert code == 1


def test_constants(capsys):
    code, out, _ = run(capsys, "constants", "--digits", "30", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert rows and all(r["ok"] for r in rows)


def test_derive_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert run(capsys, "derive", "--family", "rate64", "--params", "1,1,2,2", "-o", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def _subprocess(args, env_extra=None):
    env = dict(os.environ)
    env.update(env_extra or {})
    return subprocess.run([sys.executable, "-m", "qwz.cli", *args], capture_output=True, text=True, env=env)


def test_precision_env_variable(quarter_file):
    proc = _subprocess(["verify", str(quarter_file), "--q", "2", "--format", "json"], {"QWZ_PRECISION": "25"})
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)[0]["digits"] == 25
    proc = _subprocess(["catalog", "list"], {"QWZ_PRECISION": "abc"})
    assert proc.returncode == 1
    assert "QWZ_PRECISION" in proc.stderr
