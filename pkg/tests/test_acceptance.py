"""One line per acceptance criterion: ``criterion N: PASS|FAIL (seconds)``.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the lines.
"""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from hkrlab.acceptance import CHECKS, TIME_LIMITS, run_check


def report(n: int, ok: bool, seconds: float, note: str = "") -> None:
    print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({seconds:.2f} s){' ' + note if note else ''}")


@pytest.mark.parametrize("n", sorted(CHECKS))
def test_criterion(n):
    v = run_check(n)
    within = v.seconds <= TIME_LIMITS[n]
    report(n, v.passed and within, v.seconds, "" if within else f"over the {TIME_LIMITS[n]} s limit")
    assert v.passed, v.diagnostics
    assert within, f"took {v.seconds:.1f} s, limit {TIME_LIMITS[n]} s"


def test_criterion_11_determinism():
    # two separate processes over cheap criteria; the suite also compares two in-process runs
    args = [sys.executable, "-m", "hkrlab", "all-acceptance", "--only", "1", "2", "3", "9", "10"]
    first = subprocess.run(args, capture_output=True)
    second = subprocess.run(args, capture_output=True)
    ok = first.returncode == 0 and first.stdout == second.stdout
    verdicts = json.loads(first.stdout)["verdicts"]
    ok = ok and verdicts[-1]["criterion"] == "11" and verdicts[-1]["status"] == "pass"
    report(11, ok, 0.0)
    assert first.returncode == 0, first.stderr.decode()
    assert first.stdout == second.stdout
    assert verdicts[-1]["status"] == "pass"
