"""Surface patches, ambient 2-jets, adapted frames and fundamental forms."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import expr as ex
from .errors import DegenerateError, DomainError, SpecError

EPS_REG = 1e-12   # threshold on W^2 = EG - F^2
EPS_GS = 1e-10    # Gram-Schmidt residual norm threshold

VRANCEANU = "vranceanu"


@dataclass(frozen=True)
class SurfacePatch:
    """Immersion X(u, v) into R^n given by one expression per coordinate.

    ``family="vranceanu"`` patches also carry their profile ``r(v)`` so the
    explicit rotation-surface frame can be used instead of Gram-Schmidt.
    """

    components: tuple
    domain: tuple
    label: str = ""
    family: Optional[str] = None
    profile: Optional[ex.Expression] = None

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "domain", tuple(float(x) for x in self.domain))
        if len(self.components) < 3:
            raise SpecError("a patch needs at least 3 ambient coordinates")
        if len(self.domain) != 4:
            raise SpecError("domain must be [u_min, u_max, v_min, v_max]")
        u0, u1, v0, v1 = self.domain
        if not (u0 <= u1 and v0 <= v1):
            raise SpecError(f"empty domain {self.domain}")
        if self.family not in (None, VRANCEANU):
            raise SpecError(f"unknown family {self.family!r}")
        if self.family == VRANCEANU:
            if self.profile is None:
                raise SpecError("vranceanu patch needs a profile r(v)")
            if len(self.components) != 4:
                raise SpecError("vranceanu patches live in E^4")

    @property
    def ambient_dim(self) -> int:
        return len(self.components)

    def contains(self, u, v, slack=1e-12):
        u0, u1, v0, v1 = self.domain
        su = slack * max(1.0, u1 - u0)
        sv = slack * max(1.0, v1 - v0)
        return (u0 - su <= u <= u1 + su) and (v0 - sv <= v <= v1 + sv)

    @classmethod
    def from_strings(cls, components: Sequence[str], domain, label="", family=None, profile=None):
        prof = ex.parse(profile) if isinstance(profile, str) else profile
        return cls(tuple(ex.parse(c) for c in components), tuple(domain), label, family, prof)


def vranceanu_components(r: ex.Expression) -> tuple:
    """Coordinates (r cos v cos u, r cos v sin u, r sin v cos u, r sin v sin u)."""
    rs = ex.to_string(r)
    rterm = rs if isinstance(r, (ex.Num, ex.Var, ex.Const, ex.Call)) else f"({rs})"
    texts = (
        f"{rterm}*cos(v)*cos(u)",
        f"{rterm}*cos(v)*sin(u)",
        f"{rterm}*sin(v)*cos(u)",
        f"{rterm}*sin(v)*sin(u)",
    )
    return tuple(ex.parse(t) for t in texts)


# --------------------------------------------------------------------------
# Patch specification files
# --------------------------------------------------------------------------

def patch_from_dict(spec: dict) -> SurfacePatch:
    """Build a patch from the JSON schema used by patch files.

    ``{"label", "ambient_dim", "components": [...], "domain": [u0,u1,v0,v1],
    "family": "vranceanu", "r": "..."}``; components are derived from ``r``
    when the family is given.
    """
    if not isinstance(spec, dict):
        raise SpecError("patch spec must be a JSON object")
    try:
        domain = [float(x) for x in spec["domain"]]
    except (KeyError, TypeError, ValueError):
        raise SpecError("patch spec needs a numeric 'domain' [u0, u1, v0, v1]") from None
    label = str(spec.get("label", ""))
    family = spec.get("family")
    if family == VRANCEANU:
        if "r" not in spec:
            raise SpecError("vranceanu family needs 'r'")
        from .vranceanu import vranceanu_patch

        return vranceanu_patch(ex.parse(str(spec["r"])), domain, label=label)
    if family is not None:
        raise SpecError(f"unknown family {family!r}")
    comps = spec.get("components")
    if not isinstance(comps, list) or not comps:
        raise SpecError("patch spec needs a non-empty 'components' list")
    if "ambient_dim" in spec and int(spec["ambient_dim"]) != len(comps):
        raise SpecError(
            f"ambient_dim {spec['ambient_dim']} does not match {len(comps)} components"
        )
    return SurfacePatch.from_strings([str(c) for c in comps], domain, label=label)


def patch_to_dict(patch: SurfacePatch) -> dict:
    spec = {
        "label": patch.label,
        "ambient_dim": patch.ambient_dim,
        "components": [ex.to_string(c) for c in patch.components],
        "domain": list(patch.domain),
    }
    if patch.family == VRANCEANU:
        spec["family"] = VRANCEANU
        spec["r"] = ex.to_string(patch.profile)
    return spec


def load_patch(path) -> SurfacePatch:
    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read patch file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON in patch file: {exc}") from None
    return patch_from_dict(spec)


# --------------------------------------------------------------------------
# Jets and first fundamental form
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Jet2:
    """Position and partial derivatives (order <= 2) of X at a point."""

    X: np.ndarray
    Xu: np.ndarray
    Xv: np.ndarray
    Xuu: np.ndarray
    Xuv: np.ndarray
    Xvv: np.ndarray

    @property
    def n(self):
        return self.X.shape[0]


def eval_jet2(patch: SurfacePatch, u: float, v: float, check_domain=True) -> Jet2:
    if check_domain and not patch.contains(u, v):
        raise DomainError(f"point ({u!r}, {v!r}) outside domain {patch.domain}")
    rows = np.array([ex.eval_jet(c, u, v).astuple() for c in patch.components]).T
    return Jet2(*rows)


@dataclass(frozen=True)
class FirstFundamentalForm:
    E: float
    F: float
    G: float
    W2: float


def first_fundamental_form(jet: Jet2) -> FirstFundamentalForm:
    E = float(jet.Xu @ jet.Xu)
    F = float(jet.Xu @ jet.Xv)
    G = float(jet.Xv @ jet.Xv)
    W2 = E * G - F * F
    if W2 <= EPS_REG:
        raise DegenerateError(f"degenerate point: EG - F^2 = {W2:.3e}")
    return FirstFundamentalForm(E, F, G, W2)


# --------------------------------------------------------------------------
# Frames
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AdaptedFrame:
    """Orthonormal tangent pair X1, X2 and normals N[0..n-3] at a point.

    X1 = a1 Xu + b1 Xv and X2 = a2 Xu + b2 Xv.  ``oriented`` records whether
    (X1, X2, N1, ..., N_{n-2}) is a positively oriented basis of R^n.
    """

    X1: np.ndarray
    X2: np.ndarray
    N: np.ndarray
    a1: float
    b1: float
    a2: float
    b2: float
    oriented: bool

    @property
    def n(self):
        return self.X1.shape[0]

    @property
    def tangent(self):
        return np.vstack([self.X1, self.X2])

    def basis(self):
        """Rows X1, X2, N1, ... as an n x n orthogonal matrix."""
        return np.vstack([self.X1, self.X2, self.N])


def _orientation(X1, X2, N):
    return bool(np.linalg.det(np.vstack([X1, X2, N])) > 0)


def _tangent_pair(jet):
    nu = math.sqrt(float(jet.Xu @ jet.Xu))
    if nu * nu <= EPS_REG:
        raise DegenerateError("degenerate point: X_u vanishes")
    X1 = jet.Xu / nu
    w = jet.Xv - (X1 @ jet.Xv) * X1
    rho = math.sqrt(float(w @ w))
    if rho * rho * nu * nu <= EPS_REG:
        raise DegenerateError("degenerate point: X_u and X_v are parallel")
    X2 = w / rho
    # X2 = (Xv - (F/E) Xu) / rho
    ratio = float(jet.Xu @ jet.Xv) / (nu * nu)
    return X1, X2, 1.0 / nu, 0.0, -ratio / rho, 1.0 / rho


def _project_normal(w, X1, X2):
    return w - (w @ X1) * X1 - (w @ X2) * X2


def adapted_frame(jet: Jet2) -> AdaptedFrame:
    """Gram-Schmidt frame with deterministic normal completion.

    Normals are completed from the normal parts of Xuu, Xuv, Xvv, then the
    canonical basis; each is sign-normalized so its first nonzero coordinate
    is positive, after which the last normal is flipped if needed to make the
    whole frame positively oriented.
    """
    X1, X2, a1, b1, a2, b2 = _tangent_pair(jet)
    n = jet.n
    basis = [X1, X2]
    normals = []
    candidates = [_project_normal(w, X1, X2) for w in (jet.Xuu, jet.Xuv, jet.Xvv)]
    candidates += list(np.eye(n))
    for w in candidates:
        if len(normals) == n - 2:
            break
        r = w.astype(float).copy()
        for _ in range(2):
            for q in basis:
                r = r - (q @ r) * q
        norm = math.sqrt(float(r @ r))
        if norm <= EPS_GS:
            continue
        r = r / norm
        basis.append(r)
        normals.append(r)
    if len(normals) != n - 2:
        raise DegenerateError("could not complete the normal frame")
    for i, w in enumerate(normals):
        idx = np.flatnonzero(np.abs(w) > EPS_GS)
        if idx.size and w[idx[0]] < 0:
            normals[i] = -w
    N = np.array(normals).reshape(n - 2, n)
    if n > 2 and not _orientation(X1, X2, N):
        N[-1] = -N[-1]
    return AdaptedFrame(X1, X2, N, a1, b1, a2, b2, _orientation(X1, X2, N))


def vranceanu_frame(u: float, v: float, r: float, dr: float) -> AdaptedFrame:
    """The explicit moving frame of the rotation surface with profile r(v)."""
    A = math.hypot(r, dr)
    B = dr * math.cos(v) - r * math.sin(v)
    C = dr * math.sin(v) + r * math.cos(v)
    cu, su, cv, sv = math.cos(u), math.sin(u), math.cos(v), math.sin(v)
    X1 = np.array([-cv * su, cv * cu, -sv * su, sv * cu])
    X2 = np.array([B * cu, B * su, C * cu, C * su]) / A
    N1 = np.array([-C * cu, -C * su, B * cu, B * su]) / A
    N2 = np.array([-sv * su, sv * cu, cv * su, -cv * cu])
    N = np.vstack([N1, N2])
    return AdaptedFrame(X1, X2, N, 1.0 / r, 0.0, 0.0, 1.0 / A, _orientation(X1, X2, N))


def patch_frame(patch: SurfacePatch, u: float, v: float, jet: Jet2) -> AdaptedFrame:
    if patch.family == VRANCEANU:
        rj = ex.eval_jet(patch.profile, u, v)
        if rj.value == 0:
            raise DegenerateError(f"profile r vanishes at v={v!r}")
        return vranceanu_frame(u, v, rj.value, rj.dv)
    return adapted_frame(jet)


def standard_frame(n: int) -> AdaptedFrame:
    eye = np.eye(n)
    return AdaptedFrame(eye[0], eye[1], eye[2:], 1.0, 0.0, 0.0, 1.0, True)


# --------------------------------------------------------------------------
# Second fundamental form and shape operators
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SecondFundamentalForm:
    """Coefficients h[alpha, i, j] = <h(X_i, X_j), N_alpha> plus the vectors.

    ``h11``, ``h12``, ``h22`` are the normal-space vectors in ambient
    coordinates; ``coeffs`` has shape (n-2, 2, 2) and is symmetric in (i, j).
    """

    coeffs: np.ndarray
    frame: AdaptedFrame
    h11: np.ndarray
    h12: np.ndarray
    h22: np.ndarray

    @property
    def n(self):
        return self.frame.n

    @property
    def codim(self):
        return self.coeffs.shape[0]

    @classmethod
    def from_vectors(cls, frame, h11, h12, h22):
        N = frame.N
        c11, c12, c22 = N @ h11, N @ h12, N @ h22
        coeffs = np.empty((N.shape[0], 2, 2))
        coeffs[:, 0, 0] = c11
        coeffs[:, 0, 1] = c12
        coeffs[:, 1, 0] = c12
        coeffs[:, 1, 1] = c22
        return cls(coeffs, frame, np.asarray(h11, float), np.asarray(h12, float),
                   np.asarray(h22, float))

    @classmethod
    def from_coefficients(cls, coeffs, frame: Optional[AdaptedFrame] = None):
        """Tensor with given coefficients; the standard frame e1..en by default."""
        c = np.asarray(coeffs, dtype=float)
        if c.ndim != 3 or c.shape[1:] != (2, 2):
            raise ValueError("coefficients must have shape (n-2, 2, 2)")
        c = c.copy()
        c[:, 1, 0] = c[:, 0, 1]
        if frame is None:
            frame = standard_frame(c.shape[0] + 2)
        N = frame.N
        return cls(c, frame, c[:, 0, 0] @ N, c[:, 0, 1] @ N, c[:, 1, 1] @ N)


def second_fundamental_form(jet: Jet2, frame: AdaptedFrame) -> SecondFundamentalForm:
    X1, X2 = frame.X1, frame.X2
    pairs = ((frame.a1, frame.b1, frame.a1, frame.b1),
             (frame.a1, frame.b1, frame.a2, frame.b2),
             (frame.a2, frame.b2, frame.a2, frame.b2))
    vecs = []
    for ai, bi, aj, bj in pairs:
        w = ai * aj * jet.Xuu + (ai * bj + aj * bi) * jet.Xuv + bi * bj * jet.Xvv
        vecs.append(_project_normal(w, X1, X2))
    return SecondFundamentalForm.from_vectors(frame, *vecs)


@dataclass(frozen=True, eq=False)
class ShapeOperators:
    A: list = field(default_factory=list)


def shape_operators(sff: SecondFundamentalForm) -> ShapeOperators:
    return ShapeOperators([sff.coeffs[a].copy() for a in range(sff.codim)])


def reframe(sff: SecondFundamentalForm, tangent_rot, normal_rot) -> SecondFundamentalForm:
    """Express the same tensor in the frame X'_i = R_ij X_j, N'_a = Q_ab N_b.

    ``tangent_rot`` (2x2) and ``normal_rot`` ((n-2)x(n-2)) must be orthogonal.
    """
    R = np.asarray(tangent_rot, float)
    Q = np.asarray(normal_rot, float)
    f = sff.frame
    T = R @ f.tangent
    N = Q @ f.N
    ab = R @ np.array([[f.a1, f.b1], [f.a2, f.b2]])
    H = np.array([[sff.h11, sff.h12], [sff.h12, sff.h22]])
    Hn = np.einsum("ik,jl,kln->ijn", R, R, H)
    frame = AdaptedFrame(T[0], T[1], N, ab[0, 0], ab[0, 1], ab[1, 0], ab[1, 1],
                         _orientation(T[0], T[1], N))
    return SecondFundamentalForm.from_vectors(frame, Hn[0, 0], Hn[0, 1], Hn[1, 1])


# --------------------------------------------------------------------------
# Point evaluation and the intrinsic cross-check
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PointGeometry:
    jet: Jet2
    fff: FirstFundamentalForm
    frame: AdaptedFrame
    sff: SecondFundamentalForm


def evaluate_point(patch: SurfacePatch, u: float, v: float, check_domain=True) -> PointGeometry:
    jet = eval_jet2(patch, u, v, check_domain=check_domain)
    fff = first_fundamental_form(jet)
    frame = patch_frame(patch, u, v, jet)
    return PointGeometry(jet, fff, frame, second_fundamental_form(jet, frame))


def _metric(patch, u, v):
    Xu = np.empty(patch.ambient_dim)
    Xv = np.empty(patch.ambient_dim)
    for k, c in enumerate(patch.components):
        j = ex.eval_jet(c, u, v)
        Xu[k] = j.du
        Xv[k] = j.dv
    return float(Xu @ Xu), float(Xu @ Xv), float(Xv @ Xv)


def brioschi_curvature(patch: SurfacePatch, u: float, v: float, step: float = 1e-4) -> float:
    """Intrinsic Gaussian curvature from the metric alone.

    Uses the Brioschi formula with central finite differences of E, F, G, so
    it never touches second derivatives of X or any normal vector.
    """
    h = step
    g = {}
    for du in (-1, 0, 1):
        for dv in (-1, 0, 1):
            g[du, dv] = np.array(_metric(patch, u + du * h, v + dv * h))
    c = g[0, 0]
    d_u = (g[1, 0] - g[-1, 0]) / (2 * h)
    d_v = (g[0, 1] - g[0, -1]) / (2 * h)
    d_uu = (g[1, 0] - 2 * c + g[-1, 0]) / (h * h)
    d_vv = (g[0, 1] - 2 * c + g[0, -1]) / (h * h)
    d_uv = (g[1, 1] - g[1, -1] - g[-1, 1] + g[-1, -1]) / (4 * h * h)
    E, F, G = c
    Eu, Fu, Gu = d_u
    Ev, Fv, Gv = d_v
    Evv, Fuv, Guu = d_vv[0], d_uv[1], d_uu[2]
    m1 = np.array([
        [-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev],
        [Fv - 0.5 * Gu, E, F],
        [0.5 * Gv, F, G],
    ])
    m2 = np.array([
        [0.0, 0.5 * Ev, 0.5 * Gu],
        [0.5 * Ev, E, F],
        [0.5 * Gu, F, G],
    ])
    W2 = E * G - F * F
    return float((np.linalg.det(m1) - np.linalg.det(m2)) / (W2 * W2))
