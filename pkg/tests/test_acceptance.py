"""Acceptance criteria, one test each.

Every test records a one-line PASS/FAIL summary in ``RESULTS``; the
terminal-summary hook in conftest.py prints them after the run, and running
this file directly prints them as they complete.
"""
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from wintgen import cli, verify
from wintgen import vranceanu as vr
from wintgen.geometry import evaluate_point
from wintgen.invariants import Kind, curvature_invariants

RESULTS = []

V_MAX = math.pi / 4 - 0.05
GRID_U = [2 * math.pi * i / 32 for i in range(32)]
GRID_V = list(np.linspace(-V_MAX, V_MAX, 32))


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def grid_reports(r, vs=GRID_V):
    patch = vr.vranceanu_patch(r, (-V_MAX, V_MAX))
    return [cli.report_point(patch, u, v) for u in GRID_U for v in vs]


def test_criterion_01_first_kind_equality():
    reps = grid_reports("sqrt(cos(2*v))")
    worst = max(abs(r.defect) for r in reps)
    kinds = all(r.kind == Kind.FIRST for r in reps)
    at0 = grid_reports("sqrt(cos(2*v))", vs=[0.0])
    err0 = max(max(abs(r.K - 2), abs(r.KN - 2), abs(r.H2 - 4)) for r in at0)
    ok = worst < 1e-9 and kinds and err0 < 1e-9
    record(1, "first kind r=sqrt(cos 2v)", ok,
           f"max|defect|={worst:.2e}, kind=first everywhere: {kinds}, "
           f"max err of (K,KN,H2)-(2,2,4) at v=0: {err0:.2e}")


def test_criterion_02_second_kind_minimal():
    reps = grid_reports("1/sqrt(cos(2*v))")
    worst = max(abs(r.defect) for r in reps)
    hmax = max(math.sqrt(r.H2) for r in reps)
    kinds = all(r.kind == Kind.SECOND for r in reps)
    signed = all(r.KN_signed < 0 for r in reps)
    err0 = max(abs(r.K + 2) for r in grid_reports("1/sqrt(cos(2*v))", vs=[0.0]))
    ok = worst < 1e-9 and hmax < 1e-9 and kinds and signed and err0 < 1e-9
    record(2, "second kind r=1/sqrt(cos 2v)", ok,
           f"max|defect|={worst:.2e}, max|H|={hmax:.2e}, kind=second: {kinds}, "
           f"KN_signed<0: {signed}, |K+2| at v=0: {err0:.2e}")


def test_criterion_03_signed_normal_curvature_identity():
    worst = 0.0
    for r in verify.PROFILES:
        patch = vr.vranceanu_patch(r, verify.V_RANGE)
        for u, v in verify._sample_points(100):
            c = curvature_invariants(evaluate_point(patch, u, v).sff)
            ab = vr.closed_form_invariants(r, v)["K"]
            worst = max(worst, abs(c.K - c.KN_signed), abs(c.K - ab), abs(c.KN_signed - ab))
    record(3, "K = KN_signed = ab - a^2 on 5 profiles x 100 points", worst < 1e-9,
           f"max deviation {worst:.2e}")


def test_criterion_04_exponential_semiparallel():
    reps = grid_reports("exp(0.1*v)")
    res = max(r.semiparallel_norm for r in reps)
    flat = max(max(abs(r.K), r.KN) for r in reps)
    pert = max(r.semiparallel_norm for r in grid_reports("exp(0.1*v) + 0.01*sin(v)"))
    ok = res < 1e-9 and flat < 1e-9 and pert > 1e-4
    record(4, "exp(0.1v) semiparallel and flat; perturbation is not", ok,
           f"max residual {res:.2e}, max(|K|,KN) {flat:.2e}, perturbed max residual {pert:.2e}")


def test_criterion_05_semiparallel_closed_forms():
    suite = verify.suite_lemma41(seed=7, count=10_000)
    gap = suite.checks[0]
    vsuite = verify.suite_vranceanu(seed=7)
    closed = next(c for c in vsuite.checks if c.name == "closed_semiparallel_coefficients")
    ok = gap.passed and gap.count == 10_000 and gap.worst < 1e-10 and closed.passed
    record(5, "direct vs closed-form semiparallel tensor", ok,
           f"{gap.count} tensors, max gap {gap.worst:.2e}; "
           f"closed-form coefficients max gap {closed.worst:.2e}")


def test_criterion_06_ddvv_fuzz():
    suite = verify.suite_ddvv(seed=7, count=10_000)
    ineq, ident = suite.checks
    ok = suite.passed and ineq.count == 10_000 and ineq.worst >= -1e-8 and ident.worst < 1e-9
    record(6, "Wintgen inequality on random polynomial patches", ok,
           f"{ineq.count} patches, min defect {ineq.worst:.2e}, identity gap {ident.worst:.2e}")


def test_criterion_07_canonical_round_trip():
    suite = verify.suite_canonical(seed=7, count=1000)
    params, recon, kinds = suite.checks
    ok = suite.passed and params.worst < 1e-9 and recon.worst < 1e-9
    record(7, "canonical form round trip", ok,
           f"{params.count} tensors, parameter error {params.worst:.2e}, "
           f"reconstruction error {recon.worst:.2e}, kind failures {kinds.failures}")


def test_criterion_08_witness():
    suite = verify.suite_witness(seed=7, count=1000)
    synth, vpt, fails = suite.checks
    ok = suite.passed and synth.count == 1000
    record(8, "semiparallel Wintgen ideal witness", ok,
           f"{synth.count} synthetic tensors max(|mu|,KN) {synth.worst:.2e}; "
           f"Vranceanu point |r4|-6, |r5|-2 within {vpt.worst:.2e}, both fail: {fails.passed}")


def test_criterion_09_gauss_equation():
    suite = verify.suite_gauss(seed=7)
    worst = max(c.worst for c in suite.checks)
    counts = {c.name.rsplit("_", 1)[-1]: c.count for c in suite.checks}
    ok = suite.passed and all(n == 100 for n in counts.values()) and worst < 1e-5
    record(9, "extrinsic K vs Brioschi K", ok,
           f"{len(counts)} patches x 100 points, max gap {worst:.2e}")


def test_criterion_10_determinism():
    cmd = [sys.executable, "-m", "wintgen", "verify", "all", "--seed", "7"]
    procs = [subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.DEVNULL,
                              env=dict(os.environ)) for _ in range(2)]
    outs = [p.communicate()[0] for p in procs]
    codes = [p.returncode for p in procs]
    ok = outs[0] == outs[1] and codes == [0, 0] and len(outs[0]) > 0
    record(10, "verify all --seed 7 is byte-identical", ok,
           f"{len(outs[0])} bytes, identical: {outs[0] == outs[1]}, exit codes {codes}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
