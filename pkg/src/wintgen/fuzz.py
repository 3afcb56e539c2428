"""Random tensors, random patches and canonical-form generators.

All generators take a :class:`numpy.random.Generator` so that suites driven
from one seed are reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .geometry import (
    EPS_REG,
    AdaptedFrame,
    SecondFundamentalForm,
    SurfacePatch,
    evaluate_point,
)
from .errors import DegenerateError
from .invariants import Kind


def random_orthogonal(rng, k: int, proper: bool = True) -> np.ndarray:
    """Haar-distributed orthogonal matrix; det = +1 when ``proper``."""
    if k == 0:
        return np.zeros((0, 0))
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    q = q * np.sign(np.diag(r))
    if proper and np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_sff(rng, n: int, scale: float = 1.0) -> SecondFundamentalForm:
    """Tensor with i.i.d. uniform coefficients in the standard frame."""
    c = rng.uniform(-scale, scale, size=(n - 2, 2, 2))
    return SecondFundamentalForm.from_coefficients(c)


def random_frame(rng, n: int) -> AdaptedFrame:
    Q = random_orthogonal(rng, n)
    return AdaptedFrame(Q[0], Q[1], Q[2:], 1.0, 0.0, 0.0, 1.0, True)


_MONOMIALS = {}


def _monomial(i, j):
    if (i, j) in _MONOMIALS:
        return _MONOMIALS[i, j]
    factors = []
    for name, p in (("u", i), ("v", j)):
        if p == 1:
            factors.append(ex.Var(name))
        elif p > 1:
            factors.append(ex.BinOp("^", ex.Var(name), ex.Num(float(p))))
    _MONOMIALS[i, j] = factors
    return factors


def random_polynomial(rng, degree: int = 3) -> ex.Expression:
    """Sum of c_ij u^i v^j over i + j <= degree with c_ij uniform in [-1, 1]."""
    node = None
    for total in range(degree + 1):
        for i in range(total, -1, -1):
            c = float(rng.uniform(-1.0, 1.0))
            term = ex.Num(abs(c))
            for f in _monomial(i, total - i):
                term = ex.BinOp("*", term, f)
            if node is None:
                node = ex.Neg(term) if c < 0 else term
            else:
                node = ex.BinOp("-" if c < 0 else "+", node, term)
    return node


def random_polynomial_patch(rng, n: int, degree: int = 3) -> SurfacePatch:
    comps = tuple(random_polynomial(rng, degree) for _ in range(n))
    return SurfacePatch(comps, (-1.0, 1.0, -1.0, 1.0), label=f"poly-{n}")


def random_regular_point(rng, patch: SurfacePatch, tries: int = 100):
    """Uniform point of the domain where the patch is an immersion.

    Returns ``(u, v, geometry)`` with the :class:`PointGeometry` already
    evaluated there.
    """
    u0, u1, v0, v1 = patch.domain
    for _ in range(tries):
        u, v = float(rng.uniform(u0, u1)), float(rng.uniform(v0, v1))
        try:
            return u, v, evaluate_point(patch, u, v)
        except DegenerateError:
            continue
    raise DegenerateError(f"no regular point found after {tries} tries (W2 <= {EPS_REG})")


@dataclass(frozen=True, eq=False)
class CanonicalSample:
    sff: SecondFundamentalForm
    kind: Kind
    lambda1: float
    lambda2: float
    lambdas_rest: tuple
    mu: float
    normals: np.ndarray


def canonical_coefficients(kind, lambda1, lambda2, lambdas_rest, mu):
    m = len(lambdas_rest) + 2
    c = np.zeros((m, 2, 2))
    if kind == Kind.SECOND:
        c[0] = np.diag([lambda1 - 2 * mu, lambda1])
    else:
        c[0] = np.diag([lambda1 + mu, lambda1 - mu])
    c[1] = [[lambda2, mu], [mu, lambda2]]
    for r, lam in enumerate(lambdas_rest, start=2):
        c[r] = lam * np.eye(2)
    return c


def canonical_sample(rng, n: int, kind: Kind, mu=None) -> CanonicalSample:
    """Tensor in canonical Wintgen-ideal form placed in a random frame.

    The canonical frame is a random rotation of R^n; the frame handed to the
    tensor additionally rotates the (N1, N2) plane by a random angle, so the
    canonical normals have to be recovered from the data.
    """
    lam = rng.uniform(-2.0, 2.0, size=n - 2)
    if mu is None:
        mu = float(rng.uniform(0.2, 2.0)) * (1.0 if rng.random() < 0.5 else -1.0)
    c = canonical_coefficients(kind, lam[0], lam[1], tuple(lam[2:]), mu)
    Q = random_orthogonal(rng, n)
    X1, X2, Nc = Q[0], Q[1], Q[2:].copy()
    h11, h12, h22 = c[:, 0, 0] @ Nc, c[:, 0, 1] @ Nc, c[:, 1, 1] @ Nc
    phi = float(rng.uniform(0.0, 2.0 * math.pi))
    rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    N = Nc.copy()
    N[:2] = rot @ Nc[:2]
    frame = AdaptedFrame(X1, X2, N, 1.0, 0.0, 0.0, 1.0,
                         bool(np.linalg.det(np.vstack([X1, X2, N])) > 0))
    sff = SecondFundamentalForm.from_vectors(frame, h11, h12, h22)
    return CanonicalSample(sff, kind, float(lam[0]), float(lam[1]), tuple(float(x) for x in lam[2:]),
                           float(mu), Nc)


def umbilical_sample(rng, n: int) -> SecondFundamentalForm:
    """Wintgen ideal tensor with mu = 0: every shape operator a multiple of Id."""
    lam = rng.uniform(-2.0, 2.0, size=n - 2)
    c = np.array([x * np.eye(2) for x in lam])
    return SecondFundamentalForm.from_coefficients(c, random_frame(rng, n))
