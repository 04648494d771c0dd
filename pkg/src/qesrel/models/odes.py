"""Coefficients of the four reduced radial equations.

After t = (r^q + beta^q)^(1/q) and peeling off r^m exp(-s t), each model
leaves P(t) S'' + Q(t) S' + R(t) S = 0 with

    Dirac q=1   P = t^2 - beta t
                Q = -2 s t^2 + 2 (m + s beta) t
                R = -(2 s m + g) t + g beta                         g = gamma Z_delta
    Dirac q=2   P = t^3 - beta^2 t
                Q = -2 s t^3 + 2 m t^2 + 2 s beta^2 t + beta^2
                R = -(2 s m + g) t^2 - s^2 beta^2 t - s beta^2
    KG q=1      P = t^3 - beta t^2
                Q = -2 s t^3 + 2 (m + s beta) t^2
                R = -(2 s m - l1) t^2 - (l1 beta + l2) t + l2 beta
    KG q=2      P = t^3 - beta^2 t
                Q = -2 s t^3 + 2 m t^2 + 2 s beta^2 t + beta^2
                R = -(2 s m - l1) t^2 - l2 t - s beta^2

with s the decay rate, m = kappa (Dirac) or ell + 1 (KG), and l1, l2 the
Klein-Gordon couplings.  ``ode_coefficients`` is written so that every
argument may be a numpy array (real or complex); the batched sector search
relies on that.
"""

from __future__ import annotations

import sympy as sp

from ..elimination import OdeFamily
from ..polyvec import Poly
from ..qes import QesOde
from .sector import DerivedQuantities, Model, ModelSector


def ode_coefficients(kind: Model, q: int, s, beta, m, coupling, lam2=0.0):
    """Ascending coefficient lists (P, Q, R) for one model.

    ``coupling`` is gamma*Z_delta for Dirac and lambda1 for Klein-Gordon;
    ``lam2`` is only used by Klein-Gordon.
    """
    zero = 0.0 * beta
    if kind is Model.DIRAC and q == 1:
        P = [zero, -beta, 1.0 + zero, zero]
        Q = [zero, 2.0 * (m + s * beta), -2.0 * s + zero, zero]
        R = [coupling * beta, -(2.0 * s * m + coupling), zero]
    elif kind is Model.DIRAC and q == 2:
        b2 = beta * beta
        P = [zero, -b2, zero, 1.0 + zero]
        Q = [b2, 2.0 * s * b2, 2.0 * m + zero, -2.0 * s + zero]
        R = [-s * b2, -s * s * b2, -(2.0 * s * m + coupling)]
    elif kind is Model.KLEIN_GORDON and q == 1:
        P = [zero, zero, -beta, 1.0 + zero]
        Q = [zero, zero, 2.0 * (m + s * beta), -2.0 * s + zero]
        R = [lam2 * beta, -(coupling * beta + lam2), -(2.0 * s * m - coupling)]
    elif kind is Model.KLEIN_GORDON and q == 2:
        b2 = beta * beta
        P = [zero, -b2, zero, 1.0 + zero]
        Q = [b2, 2.0 * s * b2, 2.0 * m + zero, -2.0 * s + zero]
        R = [-s * b2, -lam2 + zero, -(2.0 * s * m - coupling)]
    else:
        raise ValueError(f"no reduced equation for {kind}, q={q}")
    return P, Q, R


def coupling_value(sector: ModelSector, derived: DerivedQuantities) -> float:
    if sector.kind is Model.DIRAC:
        return derived.gamma * sector.z_delta
    return derived.lambda1


def build_ode(sector: ModelSector, derived: DerivedQuantities) -> QesOde:
    """The physical (P, Q, R) for a concretized sector."""
    if sector.beta is None:
        raise ValueError("build_ode needs a concrete beta")
    lam2 = derived.lambda2 if derived.lambda2 is not None else 0.0
    P, Q, R = ode_coefficients(
        sector.kind, sector.q, derived.decay, sector.beta, sector.m,
        coupling_value(sector, derived), lam2,
    )
    return QesOde(Poly(P), Poly(Q), Poly(R), sector.n)


def scaled_coupling(kind: Model, n: int, m: int) -> float:
    """Coupling in units of the decay rate forced by the top coefficients.

    Dirac: gamma Z_delta / sigma = -2 (n + kappa).
    Klein-Gordon: lambda1 / xi = 2 (n + nu).
    """
    return -2.0 * (n + m) if kind is Model.DIRAC else 2.0 * (n + m)


def scaled_family(kind: Model, q: int, n: int, m: int) -> OdeFamily:
    """Symbolic scaled equation (decay rate 1, cut-off w) for the exact oracle.

    Unknowns are ``w`` (Dirac) or ``w, l2`` (Klein-Gordon); the coupling is
    fixed at ``scaled_coupling``.  Written out independently of
    ``ode_coefficients``.
    """
    t, w, l2 = sp.symbols("t w l2")
    g = sp.Integer(int(scaled_coupling(kind, n, m)))
    if kind is Model.DIRAC and q == 1:
        return OdeFamily(t, t**2 - w * t, -2 * t**2 + 2 * (m + w) * t, -(2 * m + g) * t + g * w, (w,))
    if kind is Model.DIRAC and q == 2:
        return OdeFamily(
            t, t**3 - w**2 * t, -2 * t**3 + 2 * m * t**2 + 2 * w**2 * t + w**2,
            -(2 * m + g) * t**2 - w**2 * t - w**2, (w,),
        )
    if kind is Model.KLEIN_GORDON and q == 1:
        return OdeFamily(
            t, t**3 - w * t**2, -2 * t**3 + 2 * (m + w) * t**2,
            -(2 * m - g) * t**2 - (g * w + l2) * t + l2 * w, (w, l2),
        )
    return OdeFamily(
        t, t**3 - w**2 * t, -2 * t**3 + 2 * m * t**2 + 2 * w**2 * t + w**2,
        -(2 * m - g) * t**2 - l2 * t - w**2, (w, l2),
    )
