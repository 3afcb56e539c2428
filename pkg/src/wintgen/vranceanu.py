"""Closed forms for the rotation surfaces

    X(u, v) = (r cos v cos u, r cos v sin u, r sin v cos u, r sin v sin u)

in E^4 with profile r(v): the frame functions A, B, C, k, a, b, the K = K_N
identity, the Wintgen-ideal profile families and the flat exponential family.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import expr as ex
from .errors import DomainError, SpecError
from .geometry import VRANCEANU, SurfacePatch, vranceanu_components

RADICAND_MIN = 1e-9
FULL_TURN = (0.0, 2.0 * math.pi)


@dataclass(frozen=True)
class ProfileValues:
    r: float
    dr: float
    ddr: float
    A: float
    B: float
    C: float
    k: float
    a: float
    b: float


@dataclass(frozen=True)
class VranceanuProfile:
    r: ex.Expression

    @classmethod
    def from_string(cls, text):
        return cls(ex.parse(text))

    def derivatives(self, v):
        j = ex.eval_jet(self.r, 0.0, v)
        return j.value, j.dv, j.dvv


def _profile(p) -> VranceanuProfile:
    if isinstance(p, VranceanuProfile):
        return p
    if isinstance(p, str):
        return VranceanuProfile.from_string(p)
    return VranceanuProfile(p)


def profile_functions(p, v: float) -> ProfileValues:
    p = _profile(p)
    r, dr, ddr = p.derivatives(v)
    if r == 0:
        raise DomainError(f"profile vanishes at v={v!r}")
    A2 = r * r + dr * dr
    A = math.sqrt(A2)
    return ProfileValues(
        r=r, dr=dr, ddr=ddr, A=A,
        B=dr * math.cos(v) - r * math.sin(v),
        C=dr * math.sin(v) + r * math.cos(v),
        k=dr / r,
        a=1.0 / A,
        b=(2.0 * dr * dr - r * ddr + r * r) / (A2 * A),
    )


def closed_form_invariants(p, v: float) -> dict:
    """K = KN_signed = ab - a^2 and |H|^2 = ((a + b) / 2)^2."""
    f = profile_functions(p, v)
    K = f.a * f.b - f.a * f.a
    return {"K": K, "KN_signed": K, "H2": (0.5 * (f.a + f.b)) ** 2}


def ode_residual_first(p, v: float) -> float:
    """(r')^2 + r r'' + 2 r^2, zero exactly on first-kind profiles."""
    r, dr, ddr = _profile(p).derivatives(v)
    return dr * dr + r * ddr + 2.0 * r * r


def ode_residual_second(p, v: float) -> float:
    """3 (r')^2 - r r'' + 2 r^2, zero exactly on second-kind profiles."""
    r, dr, ddr = _profile(p).derivatives(v)
    return 3.0 * dr * dr - r * ddr + 2.0 * r * r


def ode_residual_flat(p, v: float) -> float:
    """(r')^2 - r r'', zero exactly on r = c1 exp(c2 v)."""
    r, dr, ddr = _profile(p).derivatives(v)
    return dr * dr - r * ddr


def semiparallel_residual_closed(p, v: float) -> tuple:
    """Coefficients of (R.h)(X1,X1) on N2, (R.h)(X1,X2) on N1, (R.h)(X2,X2) on N2."""
    f = profile_functions(p, v)
    a, b = f.a, f.b
    return (
        3.0 * a * a * (a - b),
        a * (a - b) * (2.0 * a - b),
        a * (3.0 * a * b - 2.0 * a * a - b * b),
    )


# --------------------------------------------------------------------------
# Patches and families
# --------------------------------------------------------------------------

def vranceanu_patch(r, domain=None, label: str = "") -> SurfacePatch:
    """Rotation-surface patch for profile ``r``; ``domain`` is (u0, u1, v0, v1)
    or just the v-interval (v0, v1), in which case u covers a full turn."""
    prof = _profile(r)
    if domain is None:
        raise SpecError("vranceanu_patch needs a v-interval")
    domain = tuple(float(x) for x in domain)
    if len(domain) == 2:
        domain = FULL_TURN + domain
    _check_nonvanishing(prof.r, domain[2], domain[3])
    label = label or f"vranceanu r={ex.to_string(prof.r)}"
    return SurfacePatch(vranceanu_components(prof.r), domain, label, VRANCEANU, prof.r)


def _check_nonvanishing(r, v0, v1, samples=257):
    vs = np.linspace(v0, v1, samples)
    signs = set()
    for v in vs:
        try:
            val = ex.evaluate(r, 0.0, float(v))
        except DomainError as exc:
            raise SpecError(f"profile undefined at v={v:.6g}: {exc}") from None
        if abs(val) < 1e-12:
            raise SpecError(f"profile r vanishes at v={v:.6g}")
        signs.add(val > 0)
    if len(signs) > 1:
        raise SpecError("profile r changes sign on the domain")


def _fmt(c):
    return repr(float(c))


def _trig_combination(terms):
    """Render sum of coefficient * func(2*v), skipping zero coefficients."""
    out = []
    for coef, func in terms:
        if coef == 0:
            continue
        mag = abs(coef)
        body = f"{func}(2*v)" if mag == 1 else f"{_fmt(mag)}*{func}(2*v)"
        sign = "-" if coef < 0 else "+"
        if not out:
            out.append(body if sign == "+" else "-" + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def positive_interval(f, seed: float = 0.0, floor: float = RADICAND_MIN,
                      period: float = math.pi):
    """Widest open interval symmetric about ``seed`` on which f > floor.

    ``f`` must be a sinusoid of the given period.  If f(seed) <= floor the
    seed moves to the nearest maximiser of f.  Returns (seed, lo, hi).
    """
    g = lambda v: f(v) - floor
    if g(seed) <= 0:
        seed = _nearest_max(f, seed, period)
        if g(seed) <= 0:
            raise SpecError("radicand is never positive")
    half = period / 2.0
    right = _first_crossing(g, seed, seed + half)
    left = _first_crossing(g, seed, seed - half)
    delta = min(right - seed, seed - left)
    return seed, seed - delta, seed + delta


def _nearest_max(f, seed, period):
    # f(seed + t) = c cos(w t) + d sin(w t) is maximal at w t = atan2(d, c)
    w = 2.0 * math.pi / period
    c = f(seed)
    d = f(seed + period / 4.0)
    return seed + math.atan2(d, c) / w


def _first_crossing(g, start, end, iters=200):
    """Bisection for the first sign change of g between start and end."""
    # g(start) > 0 and g has at most one zero per half period
    if g(end) > 0:
        return end
    lo, hi = start, end
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
        if lo == hi or abs(hi - lo) < 1e-15:
            break
    return lo


@dataclass(frozen=True)
class ProfileFamily:
    r: ex.Expression
    interval: tuple
    seed: float
    text: str

    def domain(self, margin: Optional[float] = None):
        """Interval shrunk by ``margin`` (default 1% of its length) at both ends."""
        lo, hi = self.interval
        if margin is None:
            margin = 0.01 * (hi - lo)
        return (lo + margin, hi - margin)


def first_kind_profile(c1: float, c2: float, seed: float = 0.0) -> ProfileFamily:
    """r = sqrt(c1 cos 2v - c2 sin 2v) on the widest interval around the seed."""
    if c1 == 0 and c2 == 0:
        raise SpecError("first-kind profile needs (c1, c2) != (0, 0)")
    rad = _trig_combination([(c1, "cos"), (-c2, "sin")])
    text = f"sqrt({rad})"
    f = lambda v: c1 * math.cos(2 * v) - c2 * math.sin(2 * v)
    s, lo, hi = positive_interval(f, seed)
    return ProfileFamily(ex.parse(text), (lo, hi), s, text)


def second_kind_profile(c1: float, c2: float, seed: float = 0.0) -> ProfileFamily:
    """r = 1 / sqrt(c1 sin 2v - c2 cos 2v) on the widest interval around the seed."""
    if c1 == 0 and c2 == 0:
        raise SpecError("second-kind profile needs (c1, c2) != (0, 0)")
    rad = _trig_combination([(c1, "sin"), (-c2, "cos")])
    text = f"1/sqrt({rad})"
    f = lambda v: c1 * math.sin(2 * v) - c2 * math.cos(2 * v)
    s, lo, hi = positive_interval(f, seed)
    return ProfileFamily(ex.parse(text), (lo, hi), s, text)


def _signed(c, body):
    """Render ``c * body`` with an explicit leading minus for negative c."""
    mag = abs(c)
    core = body if mag == 1 else f"{_fmt(mag)}*{body}"
    return f"-{core}" if c < 0 else core


def exponential_profile(c1: float, c2: float,
                        interval=(-math.pi / 4, math.pi / 4)) -> ProfileFamily:
    """r = c1 exp(c2 v), the flat semiparallel family."""
    if c1 == 0:
        raise SpecError("exponential profile needs c1 != 0")
    if c2 == 0:
        text = _signed(c1, "1") if abs(c1) != 1 else ("1" if c1 > 0 else "-1")
        text = text.replace("*1", "")
    else:
        text = _signed(c1, f"exp({_signed(c2, 'v')})")
    lo, hi = interval
    return ProfileFamily(ex.parse(text), (float(lo), float(hi)), 0.5 * (lo + hi), text)


FAMILIES = {
    "first-kind": first_kind_profile,
    "second-kind": second_kind_profile,
    "exponential": exponential_profile,
}


def family_profile(name: str, c1: float, c2: float) -> ProfileFamily:
    try:
        make = FAMILIES[name]
    except KeyError:
        raise SpecError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    return make(c1, c2)


def family_patch(name: str, c1: float, c2: float, margin: Optional[float] = None) -> SurfacePatch:
    fam = family_profile(name, c1, c2)
    v0, v1 = fam.domain(0.0 if name == "exponential" else margin)
    label = f"{name} c1={c1:g} c2={c2:g}"
    return vranceanu_patch(fam.r, (v0, v1), label=label)
