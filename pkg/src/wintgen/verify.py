"""Verification suites driven by ``wintgen verify``.

Every suite returns a :class:`SuiteResult` made of named checks, each with
the number of cases, the number of failures and the worst residual seen.
Randomized suites draw from a child of one seeded stream; the child index is
fixed per suite so a suite produces the same cases alone or inside ``all``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fuzz
from .geometry import SurfacePatch, brioschi_curvature, evaluate_point
from .invariants import (
    Kind,
    canonical_frame,
    curvature_ellipse,
    curvature_invariants,
    point_kind,
)
from .semiparallel import (
    curvature_action_direct,
    curvature_action_lemma,
    wintgen_semiparallel_witness,
)
from . import vranceanu as vr

SUITE_NAMES = ("lemma41", "ddvv-fuzz", "vranceanu", "gauss-eq", "canonical", "witness")

DEFAULT_COUNTS = {"lemma41": 10_000, "ddvv-fuzz": 10_000, "canonical": 1_000, "witness": 1_000}


@dataclass
class Check:
    name: str
    threshold: float
    count: int = 0
    failures: int = 0
    worst: float = 0.0
    # "max": value must stay <= threshold; "min": value must stay >= threshold
    sense: str = "max"

    def add(self, value):
        value = float(value)
        self.count += 1
        if self.count == 1:
            self.worst = value
        elif self.sense == "max":
            self.worst = max(self.worst, value)
        else:
            self.worst = min(self.worst, value)
        ok = value <= self.threshold if self.sense == "max" else value >= self.threshold
        if not ok or math.isnan(value):
            self.failures += 1

    def expect(self, condition):
        """Boolean check: worst counts failures."""
        self.count += 1
        if not condition:
            self.failures += 1
            self.worst = float(self.failures)

    @property
    def passed(self):
        return self.count > 0 and self.failures == 0

    def as_dict(self):
        return {
            "name": self.name,
            "count": self.count,
            "failures": self.failures,
            "worst": self.worst,
            "threshold": self.threshold,
            "sense": self.sense,
            "passed": self.passed,
        }


@dataclass
class SuiteResult:
    name: str
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {"name": self.name, "passed": self.passed,
                "checks": [c.as_dict() for c in self.checks]}


def _rng(seed, name):
    children = np.random.SeedSequence(seed).spawn(len(SUITE_NAMES))
    return np.random.default_rng(children[SUITE_NAMES.index(name)])


def suite_lemma41(seed=0, count=None) -> SuiteResult:
    rng = _rng(seed, "lemma41")
    count = count or DEFAULT_COUNTS["lemma41"]
    gap = Check("direct_vs_lemma_componentwise", 1e-10)
    normal = Check("residual_normality", 1e-9)
    for _ in range(count):
        n = int(rng.integers(4, 9))
        sff = fuzz.random_sff(rng, n)
        K = curvature_invariants(sff).K
        d = curvature_action_direct(sff, K).as_array()
        lem = curvature_action_lemma(sff, K).as_array()
        gap.add(np.max(np.abs(d - lem)))
        normal.add(np.max(np.abs(d @ sff.frame.tangent.T)))
    return SuiteResult("lemma41", [gap, normal])


def suite_ddvv(seed=0, count=None) -> SuiteResult:
    rng = _rng(seed, "ddvv-fuzz")
    count = count or DEFAULT_COUNTS["ddvv-fuzz"]
    ineq = Check("min_defect", -1e-8, sense="min")
    ident = Check("defect_identity_gap", 1e-9)
    for _ in range(count):
        n = int(rng.integers(4, 8))
        patch = fuzz.random_polynomial_patch(rng, n)
        sff = fuzz.random_regular_point(rng, patch)[2].sff
        inv = curvature_invariants(sff)
        ell = curvature_ellipse(sff)
        b2 = float(ell.B @ ell.B)
        c2 = float(ell.C @ ell.C)
        ineq.add(inv.defect)
        ident.add(abs(inv.defect - (b2 + c2 - 2.0 * ell.wedge_norm())))
    return SuiteResult("ddvv-fuzz", [ineq, ident])


PROFILES = ("1", "exp(0.1*v)", "1 + 0.3*sin(v)", "sqrt(cos(2*v))", "1/sqrt(cos(2*v))")
V_RANGE = (-math.pi / 4 + 0.05, math.pi / 4 - 0.05)


def _sample_points(k, v_range=V_RANGE):
    """Deterministic k points: u on a golden-ratio sequence, v uniform."""
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    v0, v1 = v_range
    return [((i * golden % 1.0) * 2.0 * math.pi, v0 + (v1 - v0) * (i + 0.5) / k) for i in range(k)]


def suite_vranceanu(seed=0, count=None) -> SuiteResult:
    checks = []
    prop = Check("K_equals_KN_signed_equals_ab_minus_a2", 1e-9)
    pipeline = Check("pipeline_vs_closed_form_H2", 1e-9)
    closed = Check("closed_semiparallel_coefficients", 1e-9)
    for text in PROFILES:
        patch = vr.vranceanu_patch(text, V_RANGE)
        for u, v in _sample_points(100):
            sff = evaluate_point(patch, u, v).sff
            inv = curvature_invariants(sff)
            cf = vr.closed_form_invariants(text, v)
            prop.add(max(abs(inv.K - inv.KN_signed), abs(inv.K - cf["K"]),
                         abs(inv.KN_signed - cf["K"])))
            pipeline.add(abs(inv.H2 - cf["H2"]))
            t11, t12, t22 = vr.semiparallel_residual_closed(text, v)
            res = curvature_action_direct(sff, inv.K)
            N1, N2 = sff.frame.N
            closed.add(max(np.max(np.abs(res.T11 - t11 * N2)),
                           np.max(np.abs(res.T12 - t12 * N1)),
                           np.max(np.abs(res.T22 - t22 * N2))))
    checks += [prop, pipeline, closed]

    first = Check("first_kind_iff_ode", 0.0)
    second = Check("second_kind_minimal_iff_ode", 0.0)
    cases = list(PROFILES) + ["sqrt(sin(2*v) + 2*cos(2*v))", "1/sqrt(2*cos(2*v) - sin(2*v))"]
    for text in cases:
        patch = vr.vranceanu_patch(text, (-0.3, 0.3))
        for u, v in _sample_points(20, (-0.3, 0.3)):
            sff = evaluate_point(patch, u, v).sff
            inv = curvature_invariants(sff)
            kind = point_kind(sff)
            is_first = abs(inv.defect) <= 1e-8 and kind == Kind.FIRST
            is_second = abs(inv.defect) <= 1e-8 and kind == Kind.SECOND and math.sqrt(inv.H2) <= 1e-8
            first.expect(is_first == (abs(vr.ode_residual_first(text, v)) <= 1e-8))
            second.expect(is_second == (abs(vr.ode_residual_second(text, v)) <= 1e-8))
    checks += [first, second]

    flat = Check("exponential_semiparallel_flat", 1e-9)
    exp_patch = vr.vranceanu_patch("exp(0.1*v)", V_RANGE)
    for u, v in _sample_points(100):
        sff = evaluate_point(exp_patch, u, v).sff
        inv = curvature_invariants(sff)
        res = curvature_action_direct(sff, inv.K)
        flat.add(max(res.norm, abs(inv.K), inv.KN))
    perturbed = Check("perturbed_not_semiparallel", 1e-4, sense="min")
    pert_patch = vr.vranceanu_patch("exp(0.1*v) + 0.01*sin(v)", V_RANGE)
    worst = 0.0
    for u, v in _sample_points(100):
        sff = evaluate_point(pert_patch, u, v).sff
        worst = max(worst, curvature_action_direct(sff, curvature_invariants(sff).K).norm)
    perturbed.add(worst)
    checks += [flat, perturbed]
    return SuiteResult("vranceanu", checks)


def gauss_patches():
    return {
        "sphere": SurfacePatch.from_strings(
            ["cos(u)*cos(v)", "sin(u)*cos(v)", "sin(v)"], (0.0, 2 * math.pi, -1.2, 1.2), "sphere"),
        "plane": SurfacePatch.from_strings(["u", "v", "0"], (-1.0, 1.0, -1.0, 1.0), "plane"),
        "first-kind": vr.family_patch("first-kind", 1.0, 0.0),
        "second-kind": vr.family_patch("second-kind", 0.0, -1.0),
        "exponential": vr.family_patch("exponential", 1.0, 0.1),
    }


def suite_gauss(seed=0, count=None) -> SuiteResult:
    checks = []
    for name, patch in gauss_patches().items():
        chk = Check(f"brioschi_vs_extrinsic_{name}", 1e-5)
        u0, u1, v0, v1 = patch.domain
        lo, hi = v0 + 0.05 * (v1 - v0), v1 - 0.05 * (v1 - v0)
        for u, v in _sample_points(100, (lo, hi)):
            u = u0 + (u1 - u0) * (u / (2 * math.pi))
            K = curvature_invariants(evaluate_point(patch, u, v).sff).K
            chk.add(abs(K - brioschi_curvature(patch, u, v)))
        checks.append(chk)
    return SuiteResult("gauss-eq", checks)


def suite_canonical(seed=0, count=None) -> SuiteResult:
    rng = _rng(seed, "canonical")
    count = count or DEFAULT_COUNTS["canonical"]
    params = Check("recovered_parameters", 1e-9)
    recon = Check("reconstruction_error", 1e-9)
    kinds = Check("kind_recovered", 0.0)
    for i in range(count):
        n = int(rng.integers(4, 9))
        kind = Kind.FIRST if i % 2 == 0 else Kind.SECOND
        sample = fuzz.canonical_sample(rng, n, kind)
        can = canonical_frame(sample.sff)
        s = math.copysign(1.0, sample.mu)
        errs = [abs(can.lambda1 - s * sample.lambda1), abs(can.lambda2 - s * sample.lambda2),
                abs(can.mu - abs(sample.mu))]
        errs += [abs(a - b) for a, b in zip(can.lambdas_rest, sample.lambdas_rest)]
        params.add(max(errs))
        h11, h12, h22 = can.reconstruct()
        sff = sample.sff
        recon.add(max(np.max(np.abs(h11 - sff.h11)), np.max(np.abs(h12 - sff.h12)),
                      np.max(np.abs(h22 - sff.h22))))
        kinds.expect(can.kind == kind)
    return SuiteResult("canonical", [params, recon, kinds])


def suite_witness(seed=0, count=None) -> SuiteResult:
    rng = _rng(seed, "witness")
    count = count or DEFAULT_COUNTS["witness"]
    synth = Check("umbilical_mu_and_KN_zero", 1e-9)
    for _ in range(count):
        n = int(rng.integers(3, 9))
        w = wintgen_semiparallel_witness(fuzz.umbilical_sample(rng, n))
        synth.add(max(abs(w.mu), w.KN) if (w.semiparallel and all(w.holds)) else math.inf)
    vpt = Check("first_kind_point_witness_4_5", 1e-9)
    patch = vr.vranceanu_patch("sqrt(cos(2*v))", V_RANGE)
    w = wintgen_semiparallel_witness(evaluate_point(patch, 0.0, 0.0).sff)
    vpt.add(max(abs(abs(w.residuals[3]) - 6.0), abs(abs(w.residuals[4]) - 2.0)))
    fails = Check("first_kind_point_witness_4_5_fail", 0.0)
    fails.expect(not w.holds[3] and not w.holds[4] and not w.semiparallel)
    return SuiteResult("witness", [synth, vpt, fails])


SUITES = {
    "lemma41": suite_lemma41,
    "ddvv-fuzz": suite_ddvv,
    "vranceanu": suite_vranceanu,
    "gauss-eq": suite_gauss,
    "canonical": suite_canonical,
    "witness": suite_witness,
}


def run(name: str, seed: int = 0, count=None) -> list:
    names = SUITE_NAMES if name == "all" else (name,)
    if any(n not in SUITES for n in names):
        raise KeyError(name)
    return [SUITES[n](seed=seed, count=count) for n in names]
