"""Acceptance criteria, one test each; every test prints a PASS/FAIL line (run with -s to see them)."""

import subprocess
import sys
import time

import numpy as np
import pytest

from squeezelab import analysis
from squeezelab.validation import planck_recovery, run_criterion

EPS100_REASON = ("profile at t=0, eps=100 equals eps/(sqrt(1+eps^2)-1) = 1.01005 T_U, "
                 "outside the required 1% band")


def _check(key, report_line):
    res = run_criterion(key)
    report_line(res.line())
    return res


@pytest.mark.parametrize("key", ["C1", "C2", "C3", "C4", "C5", "C6", "C8"])
def test_criterion(key, report_line):
    res = _check(key, report_line)
    assert res.passed, res.detail


def test_C7_temperature_subchecks(report_line):
    # everything in criterion 7 except the eps = 100 bound
    T_D = 1.0
    lo = analysis.temperature_profile(0.005, T_D, 0.0) / T_D
    t = np.linspace(-0.99, 0.99, 199)
    t0 = time.perf_counter()
    even, mono = True, True
    for eps in (0.01, 1.0, 100.0):
        prof = analysis.temperature_profile(eps / 2.0, T_D, t)
        even &= bool(np.allclose(prof, prof[::-1], rtol=1e-13, atol=0))
        mono &= bool(np.all(np.diff(prof[t >= 0]) > 0))
    planck = planck_recovery()
    dt = time.perf_counter() - t0
    ok = abs(lo - 1) <= 0.01 and even and mono and planck <= 0.02 and dt < 1.0
    report_line(f"[{'PASS' if ok else 'FAIL'}] C7a T(0)/T_D at eps=0.01 {lo:.5f}; even {even}; monotone {mono}; "
          f"Planck err {planck:.1e} ({dt:.2f}s)")
    assert ok


@pytest.mark.xfail(strict=True, reason=EPS100_REASON)
def test_C7_high_epsilon_limit(report_line):
    hi = analysis.temperature_profile(50.0, 1.0, 0.0) / 50.0
    ok = abs(hi - 1.0) <= 0.01
    report_line(f"[{'PASS' if ok else 'FAIL'}] C7b T(0)/T_U at eps=100 {hi:.5f} (tol 1%)")
    assert ok


def test_C7_full_criterion_reports_failure(report_line):
    res = _check("C7", report_line)
    # the combined check fails only on the eps = 100 bound
    assert not res.passed
    assert "1.01005" in res.detail


@pytest.mark.xfail(strict=True, reason="validate exits 1 because of criterion 7 (" + EPS100_REASON + ")")
def test_C9_validate_command(report_line):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "squeezelab", "validate"], capture_output=True, text=True)
    dt = time.perf_counter() - t0
    print(proc.stdout)
    ok = proc.returncode == 0 and dt < 600
    report_line(f"[{'PASS' if ok else 'FAIL'}] C9 validate exit {proc.returncode} in {dt:.1f}s (limit 600s)")
    # everything except criterion 7 must pass in the same run
    failing = [ln for ln in proc.stdout.splitlines() if ln.startswith("[FAIL]")]
    assert all(" C7 " in ln for ln in failing), failing
    assert dt < 600
    assert ok
