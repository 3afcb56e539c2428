"""Pointwise curvature invariants, the curvature ellipse and classification."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NotWintgenIdealError, UmbilicalDegenerateError
from .geometry import EPS_GS, SecondFundamentalForm

DEFAULT_TOL = 1e-8

# Orientation cosine below which the kind of a Wintgen ideal point in E^n,
# n >= 5, is reported as indeterminate.
KIND_COSINE_MIN = 1e-6


class Kind(str, enum.Enum):
    NONE = "none"
    FIRST = "first"
    SECOND = "second"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True, eq=False)
class CurvatureInvariants:
    K: float
    KN: float
    KN_signed: Optional[float]
    H: np.ndarray
    H2: float
    defect: float


def gaussian_curvature(sff: SecondFundamentalForm) -> float:
    """K = <h11, h22> - |h12|^2."""
    return float(sff.h11 @ sff.h22 - sff.h12 @ sff.h12)


def normal_curvature_matrix(sff: SecondFundamentalForm) -> np.ndarray:
    """M[alpha, beta] = <R_perp(X1, X2) N_alpha, N_beta>.

    R_perp(X1, X2) N_a = h12^a (h11 - h22) + (h22^a - h11^a) h12.
    """
    c = sff.coeffs
    c11, c12, c22 = c[:, 0, 0], c[:, 0, 1], c[:, 1, 1]
    return np.outer(c12, c11 - c22) + np.outer(c22 - c11, c12)


def normal_curvature(sff: SecondFundamentalForm):
    """Return ``(KN, KN_signed)``.

    KN is the norm sqrt(sum_{a<b} <R_perp N_a, N_b>^2).  KN_signed is only
    defined in E^4 and equals <R_perp(X1, X2) N2, N1> = 2 <B ^ C, N1 ^ N2>
    in the frame of ``sff``; it flips sign with the frame orientation.
    """
    M = normal_curvature_matrix(sff)
    iu = np.triu_indices(M.shape[0], k=1)
    KN = float(math.sqrt(float(np.sum(M[iu] ** 2))))
    KN_signed = float(M[1, 0]) if sff.n == 4 else None
    return KN, KN_signed


def mean_curvature_vector(sff: SecondFundamentalForm) -> np.ndarray:
    return 0.5 * (sff.h11 + sff.h22)


def wintgen_defect(inv: CurvatureInvariants) -> float:
    return inv.H2 - inv.K - inv.KN


def curvature_invariants(sff: SecondFundamentalForm) -> CurvatureInvariants:
    K = gaussian_curvature(sff)
    KN, KN_signed = normal_curvature(sff)
    H = mean_curvature_vector(sff)
    H2 = float(H @ H)
    return CurvatureInvariants(K, KN, KN_signed, H, H2, H2 - K - KN)


# --------------------------------------------------------------------------
# Curvature ellipse
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CurvatureEllipse:
    """Image of the unit tangent circle under X -> h(X, X).

    h(cos t X1 + sin t X2, same) = center + cos 2t B + sin 2t C.
    """

    center: np.ndarray
    B: np.ndarray
    C: np.ndarray
    semi_axes: tuple
    circular_residual: float

    def point(self, theta: float) -> np.ndarray:
        return self.center + math.cos(2 * theta) * self.B + math.sin(2 * theta) * self.C

    def wedge_norm(self) -> float:
        """|B ^ C|, from the 2x2 minors (the Lagrange form cancels when B || C)."""
        m = np.outer(self.B, self.C)
        return float(np.linalg.norm(np.triu(m - m.T, 1)))

    def is_circle(self, tol: float = DEFAULT_TOL) -> bool:
        return self.circular_residual <= tol


def curvature_ellipse(sff: SecondFundamentalForm) -> CurvatureEllipse:
    B = 0.5 * (sff.h11 - sff.h22)
    C = sff.h12.copy()
    s = np.linalg.svd(np.column_stack([B, C]), compute_uv=False)
    nb, nc = float(np.linalg.norm(B)), float(np.linalg.norm(C))
    resid = max(abs(nb - nc), abs(float(B @ C)) / (1.0 + nb * nc))
    return CurvatureEllipse(mean_curvature_vector(sff), B, C, (float(s[0]), float(s[1])), resid)


def orientation_pairing(sff: SecondFundamentalForm) -> float:
    """2 <B ^ C, N1 ^ N2>, corrected by the orientation of the frame.

    In E^4 this is KN_signed measured in a positively oriented frame, hence a
    pointwise invariant; it is positive at Wintgen ideal points of the first
    kind and negative at those of the second kind.
    """
    if sff.codim < 2:
        return 0.0
    c = sff.coeffs
    b = 0.5 * (c[:2, 0, 0] - c[:2, 1, 1])
    cc = c[:2, 0, 1]
    p = 2.0 * float(b[0] * cc[1] - b[1] * cc[0])
    return p if sff.frame.oriented else -p


# --------------------------------------------------------------------------
# Canonical frame
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """Normal frame in which the shape operators take the Wintgen-ideal form.

    First kind:  A1 = diag(l1 + mu, l1 - mu);  second kind: A1 = diag(l1 - 2mu, l1);
    both with A2 = [[l2, mu], [mu, l2]] and A_r = l_r Id for r >= 3.
    ``rotation`` is the orthogonal matrix with N' = rotation @ N.
    """

    normals: np.ndarray
    rotation: np.ndarray
    lambda1: float
    lambda2: float
    lambdas_rest: tuple
    mu: float
    kind: Kind
    X1: np.ndarray
    X2: np.ndarray

    def coefficients(self) -> np.ndarray:
        m = len(self.lambdas_rest) + 2
        c = np.zeros((m, 2, 2))
        l1, mu = self.lambda1, self.mu
        if self.kind == Kind.SECOND:
            c[0] = np.diag([l1 - 2 * mu, l1])
        else:
            c[0] = np.diag([l1 + mu, l1 - mu])
        c[1] = [[self.lambda2, mu], [mu, self.lambda2]]
        for r, lam in enumerate(self.lambdas_rest, start=2):
            c[r] = lam * np.eye(2)
        return c

    def reconstruct(self):
        """Ambient vectors (h11, h12, h22) rebuilt from the canonical form."""
        c = self.coefficients()
        N = self.normals
        return c[:, 0, 0] @ N, c[:, 0, 1] @ N, c[:, 1, 1] @ N


def _complete_normals(first, frame_normals):
    basis = [first[0], first[1]]
    for w in frame_normals:
        if len(basis) == len(frame_normals):
            break
        r = w.copy()
        for _ in range(2):
            for q in basis:
                r = r - (q @ r) * q
        nr = float(np.linalg.norm(r))
        if nr > EPS_GS:
            basis.append(r / nr)
    return np.array(basis)


def canonical_frame(sff: SecondFundamentalForm, tol: float = DEFAULT_TOL) -> CanonicalForm:
    """Rotate the normal frame so N1' is along +-B and N2' along C.

    The tangent frame is kept.  The sign of N1' encodes the kind: N1' = B/|B|
    for the first kind and -B/|B| for the second, so (X1, X2, N1', N2') keeps
    the orientation of the input frame in E^4.
    """
    ell = curvature_ellipse(sff)
    nb = float(np.linalg.norm(ell.B))
    nc = float(np.linalg.norm(ell.C))
    if nb <= tol and nc <= tol:
        raise UmbilicalDegenerateError("umbilical point: the curvature ellipse is a point")
    if ell.circular_residual > tol:
        raise NotWintgenIdealError(
            f"curvature ellipse is not a circle (residual {ell.circular_residual:.3e})"
        )
    if sff.codim < 2:
        raise NotWintgenIdealError("a non-umbilical circle needs codimension >= 2")
    cosine = orientation_pairing(sff) / (2.0 * nb * nc)
    if cosine > KIND_COSINE_MIN:
        kind = Kind.FIRST
    elif cosine < -KIND_COSINE_MIN:
        kind = Kind.SECOND
    else:
        kind = Kind.INDETERMINATE
    n1 = ell.B / nb
    if kind == Kind.SECOND:
        n1 = -n1
    n2 = ell.C - (ell.C @ n1) * n1
    n2 = n2 / np.linalg.norm(n2)
    normals = _complete_normals((n1, n2), sff.frame.N)
    H = ell.center
    mu = float(sff.h12 @ n2)
    lam = normals @ H
    lambda1 = float(lam[0]) + (mu if kind == Kind.SECOND else 0.0)
    return CanonicalForm(
        normals=normals,
        rotation=normals @ sff.frame.N.T,
        lambda1=lambda1,
        lambda2=float(lam[1]),
        lambdas_rest=tuple(float(x) for x in lam[2:]),
        mu=mu,
        kind=kind,
        X1=sff.frame.X1,
        X2=sff.frame.X2,
    )


# --------------------------------------------------------------------------
# Classification
# --------------------------------------------------------------------------

FLAG_NAMES = (
    "regular", "totally_geodesic", "totally_umbilical", "minimal", "isotropic",
    "flat_normal", "wintgen_ideal", "semiparallel",
)


@dataclass(frozen=True)
class PointClassification:
    regular: bool = True
    totally_geodesic: bool = False
    totally_umbilical: bool = False
    minimal: bool = False
    isotropic: bool = False
    flat_normal: bool = False
    wintgen_ideal: bool = False
    semiparallel: bool = False
    kind: Kind = Kind.NONE
    tol_used: float = DEFAULT_TOL
    # only meaningful for isotropic points: |H|^2 = 3K
    h2_equals_3k: Optional[bool] = None
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def flags(self) -> dict:
        return {name: getattr(self, name) for name in FLAG_NAMES}

    def set_flags(self) -> list:
        return [name for name in FLAG_NAMES if getattr(self, name)]


def point_kind(sff: SecondFundamentalForm, tol: float = DEFAULT_TOL) -> Kind:
    inv = curvature_invariants(sff)
    if abs(inv.defect) > tol:
        return Kind.NONE
    try:
        return canonical_frame(sff, tol).kind
    except (UmbilicalDegenerateError, NotWintgenIdealError):
        return Kind.INDETERMINATE


def classify_point(sff: SecondFundamentalForm, residual=None,
                   tol: float = DEFAULT_TOL) -> PointClassification:
    """Pointwise flags; ``residual`` is a SemiparallelResidual (computed if None)."""
    if residual is None:
        from .semiparallel import curvature_action_direct

        residual = curvature_action_direct(sff, gaussian_curvature(sff))
    inv = curvature_invariants(sff)
    ell = curvature_ellipse(sff)
    H = inv.H
    nb = float(np.linalg.norm(ell.B))
    nc = float(np.linalg.norm(ell.C))
    # thresholds are applied to different norms, so the implications
    # geodesic => umbilical => flat normal are enforced explicitly
    geodesic = float(np.max(np.abs(sff.coeffs), initial=0.0)) <= tol
    umbilical = geodesic or (nb <= tol and nc <= tol)
    isotropic = (abs(nb - nc) <= tol and abs(float(ell.B @ ell.C)) <= tol
                 and abs(float(H @ ell.B)) <= tol and abs(float(H @ ell.C)) <= tol)
    ideal = umbilical or abs(inv.defect) <= tol
    kind = point_kind(sff, tol) if ideal else Kind.NONE
    return PointClassification(
        regular=True,
        totally_geodesic=geodesic,
        totally_umbilical=umbilical,
        minimal=math.sqrt(inv.H2) <= tol,
        isotropic=isotropic,
        flat_normal=umbilical or inv.KN <= tol,
        wintgen_ideal=ideal,
        semiparallel=residual.norm <= tol,
        kind=kind,
        tol_used=tol,
        h2_equals_3k=(abs(inv.H2 - 3 * inv.K) <= tol) if isotropic else None,
        extras={"circular": ell.is_circle(math.sqrt(tol))},
    )
