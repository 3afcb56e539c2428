import math

import numpy as np
import pytest

from wintgen import geometry as geo
from wintgen import vranceanu as vr
from wintgen.errors import DomainError, SpecError
from wintgen.invariants import Kind, curvature_invariants, point_kind
from wintgen.semiparallel import curvature_action_direct

PROFILES = ["1", "exp(0.1*v)", "1 + 0.3*sin(v)", "sqrt(cos(2*v))", "1/sqrt(cos(2*v))"]


def test_profile_functions_examples():
    f = vr.profile_functions("1", 0.7)
    assert (f.a, f.b, f.k) == (1.0, 1.0, 0.0)
    f = vr.profile_functions("sqrt(cos(2*v))", 0.0)
    assert (f.r, f.ddr, f.a, f.b) == pytest.approx((1, -2, 1, 3), abs=1e-14)
    f = vr.profile_functions("1/sqrt(cos(2*v))", 0.0)
    assert (f.ddr, f.a, f.b) == pytest.approx((2, 1, -1), abs=1e-14)


def test_profile_functions_general_values():
    v = 0.4
    r, dr, ddr = 2 * math.exp(0.3 * v), 0.6 * math.exp(0.3 * v), 0.18 * math.exp(0.3 * v)
    f = vr.profile_functions("2*exp(0.3*v)", v)
    A = math.hypot(r, dr)
    assert f.A == pytest.approx(A)
    assert f.B == pytest.approx(dr * math.cos(v) - r * math.sin(v))
    assert f.C == pytest.approx(dr * math.sin(v) + r * math.cos(v))
    assert f.b == pytest.approx((2 * dr * dr - r * ddr + r * r) / A**3)


def test_closed_form_examples():
    assert vr.closed_form_invariants("1", 0.3) == {"K": 0.0, "KN_signed": 0.0, "H2": 1.0}
    c = vr.closed_form_invariants("sqrt(cos(2*v))", 0.0)
    assert (c["K"], c["KN_signed"], c["H2"]) == pytest.approx((2, 2, 4))
    for v in np.linspace(-1, 1, 11):
        assert abs(vr.closed_form_invariants("3*exp(0.5*v)", v)["K"]) < 1e-14


def test_domain_errors():
    with pytest.raises(DomainError):
        vr.profile_functions("0*v", 0.0)
    with pytest.raises(DomainError):
        vr.closed_form_invariants("sqrt(cos(2*v))", 1.0)


def test_ode_residual_examples():
    assert vr.ode_residual_first("sqrt(cos(2*v))", 0.0) == pytest.approx(0.0, abs=1e-14)
    assert vr.ode_residual_first("1", 0.0) == 2.0
    for v in (0.0, 0.5):
        assert vr.ode_residual_first("exp(v)", v) == pytest.approx(4 * math.exp(2 * v))
    assert vr.ode_residual_second("1/sqrt(cos(2*v))", 0.0) == pytest.approx(0.0, abs=1e-14)
    assert vr.ode_residual_second("1", 0.0) == 2.0
    assert vr.ode_residual_second("sqrt(cos(2*v))", 0.0) == pytest.approx(4.0)
    assert vr.ode_residual_flat("2*exp(0.3*v)", 0.9) == pytest.approx(0.0, abs=1e-14)


def test_semiparallel_closed_examples():
    assert vr.semiparallel_residual_closed("exp(0.2*v)", 0.5) == pytest.approx((0, 0, 0), abs=1e-14)
    assert vr.semiparallel_residual_closed("sqrt(cos(2*v))", 0.0) == pytest.approx((-6, 2, -2))
    assert vr.semiparallel_residual_closed("1/sqrt(cos(2*v))", 0.0) == pytest.approx((6, 6, -6))


def _samples(k=100, lo=-0.7, hi=0.7, seed=0):
    rng = np.random.default_rng(seed)
    return zip(rng.uniform(0, 2 * math.pi, k), rng.uniform(lo, hi, k))


@pytest.mark.parametrize("r", PROFILES)
def test_pipeline_matches_closed_form(r):
    patch = vr.vranceanu_patch(r, (-0.75, 0.75))
    for u, v in _samples():
        pg = geo.evaluate_point(patch, u, v)
        c = curvature_invariants(pg.sff)
        cf = vr.closed_form_invariants(r, v)
        ab = cf["K"]
        assert abs(c.K - c.KN_signed) <= 1e-9
        assert abs(c.K - ab) <= 1e-9 and abs(c.KN_signed - ab) <= 1e-9
        assert abs(c.H2 - cf["H2"]) <= 1e-9
        t11, t12, t22 = vr.semiparallel_residual_closed(r, v)
        res = curvature_action_direct(pg.sff, c.K)
        N1, N2 = pg.frame.N
        assert np.max(np.abs(res.T11 - t11 * N2)) <= 1e-9
        assert np.max(np.abs(res.T12 - t12 * N1)) <= 1e-9
        assert np.max(np.abs(res.T22 - t22 * N2)) <= 1e-9


def test_sff_coefficients_along_frame():
    patch = vr.vranceanu_patch("1 + 0.3*sin(v)", (-1, 1))
    for u, v in _samples(20, -1, 1):
        pg = geo.evaluate_point(patch, u, v)
        f = vr.profile_functions("1 + 0.3*sin(v)", v)
        N1, N2 = pg.frame.N
        np.testing.assert_allclose(pg.sff.h11, f.a * N1, atol=1e-13)
        np.testing.assert_allclose(pg.sff.h22, f.b * N1, atol=1e-13)
        np.testing.assert_allclose(pg.sff.h12, -f.a * N2, atol=1e-13)


FIRST_KIND = ["sqrt(cos(2*v))", "sqrt(sin(2*v) + 2*cos(2*v))", "sqrt(3*cos(2*v) - sin(2*v))"]
SECOND_KIND = ["1/sqrt(cos(2*v))", "1/sqrt(2*cos(2*v) - sin(2*v))", "1/sqrt(sin(2*v) + 3*cos(2*v))"]
OTHERS = ["1", "exp(0.1*v)", "1 + 0.3*sin(v)", "2 + v^2", "cos(v)"]


@pytest.mark.parametrize("r", FIRST_KIND + SECOND_KIND + OTHERS)
def test_kind_equivalences(r):
    patch = vr.vranceanu_patch(r, (-0.3, 0.3))
    for u, v in _samples(30, -0.3, 0.3, seed=1):
        sff = geo.evaluate_point(patch, u, v).sff
        c = curvature_invariants(sff)
        ideal = abs(c.defect) <= 1e-8
        kind = point_kind(sff)
        first = ideal and kind == Kind.FIRST
        second_min = ideal and kind == Kind.SECOND and math.sqrt(c.H2) <= 1e-8
        assert first == (abs(vr.ode_residual_first(r, v)) <= 1e-8)
        assert second_min == (abs(vr.ode_residual_second(r, v)) <= 1e-8)
        assert first == (r in FIRST_KIND)
        assert second_min == (r in SECOND_KIND)


@pytest.mark.parametrize("r,flat", [("exp(0.1*v)", True), ("2*exp(-0.4*v)", True),
                                    ("1", True), ("exp(0.1*v) + 0.01*sin(v)", False),
                                    ("sqrt(cos(2*v))", False)])
def test_semiparallel_iff_a_equals_b(r, flat):
    patch = vr.vranceanu_patch(r, (-0.6, 0.6))
    for u, v in _samples(40, -0.6, 0.6, seed=2):
        sff = geo.evaluate_point(patch, u, v).sff
        c = curvature_invariants(sff)
        f = vr.profile_functions(r, v)
        semi = curvature_action_direct(sff, c.K).norm <= 1e-8
        assert semi == (abs(f.a - f.b) <= 1e-8) == (abs(vr.ode_residual_flat(r, v)) <= 1e-8)
        if semi:
            assert abs(c.K) <= 1e-9 and c.KN <= 1e-9


def test_vranceanu_patch_examples():
    patch = vr.vranceanu_patch("1", (-1, 1))
    assert patch.family == geo.VRANCEANU and patch.ambient_dim == 4
    np.testing.assert_allclose(geo.eval_jet2(patch, 0, 0).X, [1, 0, 0, 0])
    vr.vranceanu_patch("sqrt(cos(2*v))", (-0.78, 0.78))
    with pytest.raises(SpecError):
        vr.vranceanu_patch("0", (-1, 1))
    with pytest.raises(SpecError):
        vr.vranceanu_patch("v", (-1, 1))
    with pytest.raises(SpecError):
        vr.vranceanu_patch("sqrt(cos(2*v))", (-1, 1))


def test_first_kind_family():
    fam = vr.first_kind_profile(1, 0)
    assert fam.text == "sqrt(cos(2*v))"
    assert fam.interval == pytest.approx((-math.pi / 4, math.pi / 4), abs=1e-8)
    fam = vr.first_kind_profile(0, -1)
    assert fam.text == "sqrt(sin(2*v))"
    assert fam.interval == pytest.approx((0, math.pi / 2), abs=1e-8)
    with pytest.raises(SpecError):
        vr.first_kind_profile(0, 0)


def test_second_kind_family():
    fam = vr.second_kind_profile(0, -1)
    assert fam.text == "1/sqrt(cos(2*v))"
    assert fam.interval == pytest.approx((-math.pi / 4, math.pi / 4), abs=1e-8)
    fam = vr.second_kind_profile(1, 0)
    assert fam.text == "1/sqrt(sin(2*v))"
    assert fam.interval == pytest.approx((0, math.pi / 2), abs=1e-8)
    with pytest.raises(SpecError):
        vr.second_kind_profile(0, 0)


@pytest.mark.parametrize("c1,c2", [(1, 0), (0, -1), (2, -1), (-1, 3), (0.5, 0.5)])
def test_family_radicand_positive_on_interval(c1, c2):
    for make in (vr.first_kind_profile, vr.second_kind_profile):
        fam = make(c1, c2)
        lo, hi = fam.interval
        assert lo < fam.seed < hi
        assert fam.seed - lo == pytest.approx(hi - fam.seed)
        patch = vr.vranceanu_patch(fam.r, fam.domain())
        for v in np.linspace(*fam.domain(), 21):
            sff = geo.evaluate_point(patch, 0.0, v).sff
            assert abs(curvature_invariants(sff).defect) < 1e-9


def test_exponential_family():
    fam = vr.exponential_profile(1, 0.1)
    assert fam.text == "exp(0.1*v)"
    assert vr.exponential_profile(2, -0.5).text == "2.0*exp(-0.5*v)"
    with pytest.raises(SpecError):
        vr.exponential_profile(0, 1)
    with pytest.raises(SpecError):
        vr.family_profile("klein", 1, 1)
