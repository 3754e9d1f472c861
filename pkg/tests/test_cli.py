from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from hkrlab import cli
from hkrlab.acceptance import FAIL, Verdict
from hkrlab.cli import Report, RunConfig, emit, main

GOLDEN = Path(__file__).parent / "golden"

# frozen report schema: regenerate with HKRLAB_REGOLD=1 after an intended change
GOLDEN_RUNS = {
    "witt_law_p2_m2": ["witt-law", "--p", "2", "--m", "2"],
    "hh_qx_d2": ["hh", "--algebra", "Q[x]", "--degree", "2", "--window", "3"],
    "hh_cusp_csv": ["hh", "--algebra", "Q[x(2),y(3)]/(y^2-x^3)", "--degree", "6", "--window", "2", "--format", "csv"],
    "cartier_p2_m2": ["cartier", "--p", "2", "--m", "2"],
    "circle_ext_truncated": ["circle-ext", "--kind", "truncated", "--ring", "F_3", "--N", "3", "--window", "3"],
    "fgl_mult_n3": ["fgl", "--lam", "1", "--N", "3"],
}


def run(args, capsysbinary):
    code = main(args)
    return code, capsysbinary.readouterr().out


@pytest.mark.parametrize("name", sorted(GOLDEN_RUNS))
def test_golden(name, capsysbinary):
    code, out = run(GOLDEN_RUNS[name], capsysbinary)
    assert code == 0
    ext = "csv" if "--format" in GOLDEN_RUNS[name] else "json"
    path = GOLDEN / f"{name}.{ext}"
    if os.environ.get("HKRLAB_REGOLD"):
        path.write_bytes(out)
    assert out == path.read_bytes()


def test_witt_law_text(capsysbinary):
    _, out = run(["witt-law", "--p", "2", "--m", "2"], capsysbinary)
    d = json.loads(out)
    assert d["results"]["text"]["S_1"] == "-x_0*y_0 + x_1 + y_1"
    assert d["results"]["text"]["F_0"] == "x_0^2 + 2*x_1"


def test_numbers_are_decimal_strings(capsysbinary):
    _, out = run(["cartier", "--p", "3", "--m", "1"], capsysbinary)
    d = json.loads(out)
    assert d["config"] == {"command": "cartier", "p": "3", "m": "1"}
    assert d["results"]["alpha"]["rank"] == "3"


def test_hh_csv_table(capsysbinary):
    _, out = run(["hh", "--algebra", "Q[x]", "--degree", "2", "--window", "3", "--format", "csv"], capsysbinary)
    assert out.decode().splitlines() == ["n,internal_degree,free_rank,torsion", "0,2,1,", "1,2,1,", "2,2,0,", "3,2,0,"]


def test_repeated_runs_identical(capsysbinary):
    args = ["hcminus", "--algebra", "Q[x,y]", "--degree", "2", "--model", "both"]
    assert run(args, capsysbinary) == run(args, capsysbinary)


def test_timings_only_on_request(capsysbinary):
    _, plain = run(["cartier", "--p", "2", "--m", "1"], capsysbinary)
    _, timed = run(["cartier", "--p", "2", "--m", "1", "--timings"], capsysbinary)
    assert "timings" not in json.loads(plain)
    assert "total" in json.loads(timed)["timings"]


def test_output_file(tmp_path, capsysbinary):
    target = tmp_path / "r.json"
    assert main(["cartier", "--p", "2", "--m", "1", "-o", str(target)]) == 0
    _, out = run(["cartier", "--p", "2", "--m", "1"], capsysbinary)
    assert target.read_bytes() == out


@pytest.mark.parametrize("args,field", [
    (["witt-law", "--p", "4", "--m", "2"], "--p"),
    (["witt-law", "--p", "2", "--m", "0"], "--m"),
    (["hh", "--algebra", "Q[x", "--degree", "2"], "--algebra"),
    (["hh", "--algebra", "Q[x]", "--degree", "-1"], "--degree"),
    (["fgl", "--ring", "R", "--N", "3"], "--ring"),
    (["circle-ext", "--kind", "truncated", "--ring", "F_2"], "--N"),
])
def test_invalid_config_exits_2(args, field, capsys):
    with pytest.raises(SystemExit) as exc:
        main(args)
    assert exc.value.code == 2
    assert f"invalid {field}" in capsys.readouterr().err


def test_failed_verdict_has_diagnostics_and_exit_1(monkeypatch, capsysbinary):
    def broken(cfg):
        return Report(cfg, {}, [Verdict(1, "always fails", FAIL)])

    monkeypatch.setitem(cli.COMMANDS, "cartier", broken)
    code, out = run(["cartier", "--p", "2", "--m", "1"], capsysbinary)
    assert code == 1
    v = json.loads(out)["verdicts"][0]
    assert v["status"] == "fail" and v["diagnostics"]


def test_csv_defaults_to_verdicts():
    rep = Report(RunConfig("x"), {}, [Verdict(1, "t", FAIL, {}, ["a", "b"])])
    assert emit(rep, "csv") == b"criterion,title,status,diagnostics\n1,t,fail,a;b\n"


def test_json_trailing_newline():
    assert emit(Report(RunConfig("x")), "json").endswith(b"}\n")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "hkrlab", "witt-law", "--p", "3", "--m", "1"], capture_output=True)
    assert r.returncode == 0 and json.loads(r.stdout)["command"] == "witt-law"
