"""Finite sl(2) algebraization of the reduced equation.

Matrices act on polynomials of degree <= n in the monomial basis
{1, t, ..., t^n}; column k holds the image of t^k.  The differential
generators are

    J^- = d/dt,   J^0 = t d/dt - n/2,   J^+ = t^2 d/dt - n t,

and the operator H = P d^2/dt^2 + Q d/dt + (R - c0) keeps the space of
degree <= n polynomials invariant exactly when b3 = c2 = 0 and
c1 = -n[(n - 1) a3 + b2].  Then H is a quadratic element of the enveloping
algebra and its eigenvalues are the admissible values of -c0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qes import QesOde

__all__ = [
    "OperatorMatrix",
    "QesConditionError",
    "InvarianceError",
    "QesCondition",
    "Spectrum",
    "generators",
    "qes_condition",
    "assemble_H",
    "direct_matrix",
    "spectrum",
    "dirac_q1_printed_form",
    "max_deviation",
]

CONDITION_TOL = 1e-12


class QesConditionError(ValueError):
    """The ODE fails the algebraization condition."""


class InvarianceError(ValueError):
    """The operator maps some degree <= n monomial outside the space."""


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {a.shape}")
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.dim - 1

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.entries @ other.entries)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.entries + other.entries)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.entries - other.entries)

    def __rmul__(self, k: float) -> "OperatorMatrix":
        return OperatorMatrix(k * self.entries)

    def apply(self, coeffs) -> np.ndarray:
        """Image of the polynomial with ascending coefficients ``coeffs``."""
        return self.entries @ np.asarray(coeffs, dtype=float)


def generators(n: int) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """(J^-, J^0, J^+) on the (n+1)-dimensional module."""
    if n < 0:
        raise ValueError("n must be non-negative")
    d = n + 1
    jm, j0, jp = np.zeros((d, d)), np.zeros((d, d)), np.zeros((d, d))
    for k in range(d):
        if k >= 1:
            jm[k - 1, k] = k
        j0[k, k] = k - n / 2.0
        if k < n:
            jp[k + 1, k] = k - n
    return OperatorMatrix(jm), OperatorMatrix(j0), OperatorMatrix(jp)


@dataclass(frozen=True)
class QesCondition:
    holds: bool
    violations: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.holds


def qes_condition(ode: QesOde, n: int | None = None, tol: float = CONDITION_TOL) -> QesCondition:
    """Check b3 = 0, c2 = 0 and c1 = -n[(n-1) a3 + b2] to ``tol`` * scale."""
    n = ode.n if n is None else n
    scale = max(1.0, ode.scale())
    a3, b3, b2 = ode.a(3), ode.b(3), ode.b(2)
    c2, c1 = ode.c(2), ode.c(1)
    want_c1 = -n * ((n - 1) * a3 + b2)
    bad = []
    if abs(b3) > tol * scale:
        bad.append(f"b3 != 0 (b3 = {b3!r})")
    if abs(c2) > tol * scale:
        bad.append(f"c2 != 0 (c2 = {c2!r})")
    if abs(c1 - want_c1) > tol * scale * max(1, n * n):
        bad.append(f"c1 != -n[(n-1)a3 + b2] (c1 = {c1!r}, required {want_c1!r})")
    return QesCondition(not bad, tuple(bad))


def assemble_H(ode: QesOde, n: int | None = None) -> OperatorMatrix:
    """H as a combination of generator products; requires ``qes_condition``."""
    n = ode.n if n is None else n
    cond = qes_condition(ode, n)
    if not cond:
        raise QesConditionError("algebraization condition fails: " + "; ".join(cond.violations))
    a0, a1, a2, a3 = (ode.a(k) for k in range(4))
    b0, b1, b2 = ode.b(0), ode.b(1), ode.b(2)
    jm, j0, jp = generators(n)
    ident = OperatorMatrix(np.eye(n + 1))
    return (
        a3 * (jp @ j0) + a2 * (j0 @ j0) + a1 * (j0 @ jm) + a0 * (jm @ jm)
        + ((3 * n - 2) / 2.0 * a3 + b2) * jp
        + ((n - 1) * a2 + b1) * j0
        + (n / 2.0 * a1 + b0) * jm
        + (-n * n / 4.0 * a2 + n / 2.0 * ((n - 1) * a2 + b1)) * ident
    )


def direct_matrix(ode: QesOde, n: int | None = None, tol: float = CONDITION_TOL) -> OperatorMatrix:
    """Matrix of P d^2 + Q d + (R - c0) on degree <= n polynomials."""
    n = ode.n if n is None else n
    size = n + 4  # room for the overflow terms t^(n+1), t^(n+2)
    img = np.zeros((size, n + 1))
    for k in range(n + 1):
        for j in range(4):
            if k >= 2:
                img[k - 2 + j, k] += ode.a(j) * k * (k - 1)
            if k >= 1:
                img[k - 1 + j, k] += ode.b(j) * k
        for j in (1, 2):
            img[k + j, k] += ode.c(j)
    scale = max(1.0, ode.scale()) * max(1, n * n)
    over = np.argwhere(np.abs(img[n + 1:]) > tol * scale)
    if over.size:
        deg, k = over[0]
        raise InvarianceError(
            f"t^{k} maps to a polynomial with a t^{n + 1 + deg} term "
            f"(coefficient {float(img[n + 1 + deg, k])!r}); degree <= {n} is not invariant"
        )
    return OperatorMatrix(img[: n + 1])


@dataclass(frozen=True)
class Spectrum:
    real: tuple[float, ...]
    complex_pairs: tuple[complex, ...] = ()  # one member (Im > 0) per pair

    @property
    def all_real(self) -> bool:
        return not self.complex_pairs

    def contains(self, value: float, tol: float = 1e-9) -> bool:
        return any(abs(v - value) <= tol * max(1.0, abs(value)) for v in self.real)


def spectrum(m: OperatorMatrix, imag_tol: float = 1e-9) -> Spectrum:
    """Eigenvalues, split into real ones and complex-conjugate pairs."""
    if m.dim > 8:
        raise ValueError("spectrum is meant for dim <= 8")
    ev = np.linalg.eigvals(m.entries)
    real, cplx = [], []
    for z in ev:
        if abs(z.imag) <= imag_tol * max(1.0, abs(z)):
            real.append(float(z.real))
        elif z.imag > 0:
            cplx.append(complex(z))
    return Spectrum(tuple(sorted(real)), tuple(sorted(cplx, key=lambda z: (z.real, z.imag))))


def dirac_q1_printed_form(n: int, kappa: float, sigma: float, beta: float) -> OperatorMatrix:
    """The Dirac q=1 combination as usually quoted, including its scalar term
    n/4 [n + 2(kappa + sigma beta - 1)].

    Matching coefficients against ``direct_matrix`` gives the scalar
    n/4 [n - 2 + 4(kappa + sigma beta)] instead; the two differ by the
    constant n (kappa + sigma beta) / 2, which ``max_deviation`` exposes.
    """
    jm, j0, jp = generators(n)
    ident = OperatorMatrix(np.eye(n + 1))
    ks = kappa + sigma * beta
    return (
        (j0 @ j0) + (-beta) * (j0 @ jm) + (-2.0 * sigma) * jp
        + ((n - 1) + 2.0 * ks) * j0
        + (-n * beta / 2.0) * jm
        + (n / 4.0 * (n + 2.0 * (ks - 1.0))) * ident
    )


def max_deviation(a: OperatorMatrix, b: OperatorMatrix) -> tuple[float, tuple[int, int]]:
    """Largest entrywise |a - b| and the (row, column) where it occurs."""
    d = np.abs(a.entries - b.entries)
    i, j = np.unravel_index(int(np.argmax(d)), d.shape)
    return float(d[i, j]), (int(i), int(j))
