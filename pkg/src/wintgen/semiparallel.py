"""The tensor (R(X1, X2) . h)(X_k, X_l) of the van der Waerden-Bortolotti
connection, computed by two independent routes, and semiparallelity tests."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotWintgenIdealError, UmbilicalDegenerateError
from .geometry import SecondFundamentalForm
from .invariants import (
    DEFAULT_TOL,
    canonical_frame,
    curvature_ellipse,
    curvature_invariants,
    normal_curvature_matrix,
)


@dataclass(frozen=True, eq=False)
class SemiparallelResidual:
    T11: np.ndarray
    T12: np.ndarray
    T22: np.ndarray
    norm: float
    method: str

    def as_array(self):
        return np.vstack([self.T11, self.T12, self.T22])


def _residual(T11, T12, T22, method):
    norm = math.sqrt(float(T11 @ T11 + 2.0 * (T12 @ T12) + T22 @ T22))
    return SemiparallelResidual(T11, T12, T22, norm, method)


def curvature_action_direct(sff: SecondFundamentalForm, K: float) -> SemiparallelResidual:
    """Apply the curvature operators to h term by term.

    (R.h)(X_k, X_l) = R_perp h(X_k, X_l) - h(R X_k, X_l) - h(X_k, R X_l), with
    the normal curvature operator as an (n-2)x(n-2) matrix and the tangent one
    determined by R(X1, X2) X1 = -K X2, R(X1, X2) X2 = K X1.
    """
    c = sff.coeffs
    # P[beta, alpha] = <R_perp N_alpha, N_beta>
    P = normal_curvature_matrix(sff).T
    # Rt[m, k]: component along X_m of R(X1, X2) X_k
    Rt = np.array([[0.0, K], [-K, 0.0]])
    normal_part = np.einsum("ba,akl->bkl", P, c)
    tangent_part = np.einsum("mk,bml->bkl", Rt, c) + np.einsum("ml,bkm->bkl", Rt, c)
    T = normal_part - tangent_part
    N = sff.frame.N
    return _residual(T[:, 0, 0] @ N, T[:, 0, 1] @ N, T[:, 1, 1] @ N, "direct")


def curvature_action_lemma(sff: SecondFundamentalForm, K: float) -> SemiparallelResidual:
    """Closed forms in terms of h12 and d = h11 - h22 (sums over normals):

    T11 = (sum h11^a (h22^a - h11^a) + 2K) h12 + (sum h11^a h12^a) d
    T12 = (sum h12^a (h22^a - h11^a)) h12 + (sum h12^a h12^a - K) d
    T22 = (sum h22^a (h22^a - h11^a) - 2K) h12 + (sum h22^a h12^a) d
    """
    c = sff.coeffs
    c11, c12, c22 = c[:, 0, 0], c[:, 0, 1], c[:, 1, 1]
    h12 = sff.h12
    d = sff.h11 - sff.h22
    T11 = (c11 @ (c22 - c11) + 2.0 * K) * h12 + (c11 @ c12) * d
    T12 = (c12 @ (c22 - c11)) * h12 + (c12 @ c12 - K) * d
    T22 = (c22 @ (c22 - c11) - 2.0 * K) * h12 + (c22 @ c12) * d
    return _residual(T11, T12, T22, "lemma")


def is_semiparallel(res: SemiparallelResidual, tol: float = DEFAULT_TOL) -> bool:
    return res.norm <= tol


@dataclass(frozen=True)
class WitnessReport:
    """Scalar system satisfied by semiparallel Wintgen ideal points.

    ``residuals`` are, in order: mu^2 d, lambda2 mu d, (mu^2 - K) d,
    mu (h11 (h22 - h11) + 2K), mu (h22 (h22 - h11) - 2K) with d = h11 - h22,
    all coefficients along the canonical N1'.
    """

    mu: float
    KN: float
    K: float
    lambda2: float
    h11_1: float
    h22_1: float
    residuals: tuple
    holds: tuple
    semiparallel: bool
    umbilical: bool
    # False only if the point is semiparallel but mu or KN is not ~0
    conclusion_holds: bool


def wintgen_semiparallel_witness(sff: SecondFundamentalForm,
                                 tol: float = DEFAULT_TOL) -> WitnessReport:
    inv = curvature_invariants(sff)
    if abs(inv.defect) > tol:
        raise NotWintgenIdealError(f"Wintgen defect {inv.defect:.3e} exceeds {tol:g}")
    K = inv.K
    try:
        can = canonical_frame(sff, tol)
        n1 = can.normals[0]
        mu = can.mu
        lambda2 = can.lambda2
        umbilical = False
    except UmbilicalDegenerateError:
        # B = C = 0: every normal frame is canonical, mu = 0.
        ell = curvature_ellipse(sff)
        n1 = sff.frame.N[0]
        mu = 0.0
        lambda2 = float(ell.center @ sff.frame.N[1]) if sff.codim > 1 else 0.0
        umbilical = True
    h11 = float(sff.h11 @ n1)
    h22 = float(sff.h22 @ n1)
    d = h11 - h22
    residuals = (
        mu * mu * d,
        lambda2 * mu * d,
        (mu * mu - K) * d,
        mu * (h11 * (h22 - h11) + 2.0 * K),
        mu * (h22 * (h22 - h11) - 2.0 * K),
    )
    holds = tuple(abs(r) <= tol for r in residuals)
    semi = is_semiparallel(curvature_action_direct(sff, K), tol)
    conclusion = (not semi) or (abs(mu) <= tol and inv.KN <= tol)
    return WitnessReport(mu, inv.KN, K, lambda2, h11, h22, residuals, holds, semi,
                         umbilical, conclusion)
