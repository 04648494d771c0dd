"""Dense univariate real polynomials.

Coefficients are stored in ascending powers: ``Poly([2, -3, 1])`` is
``t**2 - 3*t + 2``.  Only exact zeros are trimmed from the top so that
residual checks can still see numerical near-zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = ["Poly", "roots_real_upto_cubic", "from_roots"]


def _trim(coeffs: Sequence[float]) -> tuple[float, ...]:
    out = [float(c) for c in coeffs]
    while out and out[-1] == 0.0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True, init=False)
class Poly:
    """Immutable polynomial with canonical (trimmed) ascending coefficients."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float] = ()):
        object.__setattr__(self, "coeffs", _trim(list(coeffs)))

    @classmethod
    def zero(cls) -> "Poly":
        return cls(())

    @classmethod
    def monomial(cls, k: int, c: float = 1.0) -> "Poly":
        return cls([0.0] * k + [c])

    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> float:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0.0

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def __add__(self, other: "Poly | float") -> "Poly":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.coeff(k) + other.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other: "Poly | float") -> "Poly":
        return self + (-_as_poly(other))

    def __rsub__(self, other: float) -> "Poly":
        return _as_poly(other) - self

    def __mul__(self, other: "Poly | float") -> "Poly":
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Poly.zero()
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def deriv(self, order: int = 1) -> "Poly":
        c = list(self.coeffs)
        for _ in range(order):
            c = [k * c[k] for k in range(1, len(c))]
        return Poly(c)

    def __call__(self, x):
        # Horner; works for floats, complex numbers and numpy arrays alike
        acc = 0.0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)!r})"


def _as_poly(x: "Poly | float") -> Poly:
    return x if isinstance(x, Poly) else Poly([x])


def from_roots(roots: Iterable[float]) -> Poly:
    """Monic polynomial prod (t - r_i); the constant 1 for no roots."""
    p = Poly([1.0])
    for r in roots:
        p = p * Poly([-float(r), 1.0])
    return p


def _polish(p: Poly, x: float) -> float:
    dp = p.deriv()
    d = dp(x)
    if d == 0.0:
        return x
    y = x - p(x) / d
    return y if abs(p(y)) <= abs(p(x)) else x


def _quadratic(c: float, b: float, a: float) -> list[float]:
    # a t^2 + b t + c, cancellation-free form
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return []
    if disc == 0.0:
        return [-b / (2.0 * a)] * 2
    s = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(s, b))
    r1 = q / a
    r2 = c / q if q != 0.0 else -r1
    return [r1, r2]


def _cubic(d: float, c: float, b: float, a: float) -> list[float]:
    # a t^3 + b t^2 + c t + d with a != 0, d != 0
    b, c, d = b / a, c / a, d / a
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    disc = -(4.0 * p**3 + 27.0 * q * q)
    scale = max(abs(p) ** 1.5, abs(q), 1e-300)
    if abs(disc) <= 1e-14 * scale * scale:
        if p == 0.0 or abs(p) ** 1.5 <= 1e-14 * scale:
            ys = [-math.copysign(abs(q) ** (1.0 / 3.0), q)] * 3
        else:
            ys = [3.0 * q / p, -1.5 * q / p, -1.5 * q / p]
    elif disc > 0.0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * m)))
        theta = math.acos(arg) / 3.0
        ys = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
    else:
        s = math.sqrt(q * q / 4.0 + p**3 / 27.0)
        u = -q / 2.0 + math.copysign(s, -q)
        u = math.copysign(abs(u) ** (1.0 / 3.0), u)
        ys = [u - p / (3.0 * u)] if u != 0.0 else [0.0]
    return [y - shift for y in ys]


def roots_real_upto_cubic(p: Poly) -> list[float]:
    """Real roots (with multiplicity, ascending) of a polynomial of degree 1..3.

    Closed forms: linear, stable quadratic, and a discriminant-split cubic
    (trigonometric branch for three real roots, Cardano otherwise).  Each
    root gets one Newton polish against ``p``.  Exact zero roots are
    factored out first so structural roots at the origin come back as 0.
    """
    deg = p.degree()
    if not 1 <= deg <= 3:
        raise ValueError(f"roots_real_upto_cubic needs degree 1..3, got {deg}")
    c = list(p.coeffs)
    zeros = 0
    while c[0] == 0.0:
        c.pop(0)
        zeros += 1
    rest = len(c) - 1
    if rest == 0:
        found = []
    elif rest == 1:
        found = [-c[0] / c[1]]
    elif rest == 2:
        found = _quadratic(*c)
    else:
        found = _cubic(*c)
    found = [_polish(p, r) for r in found]
    return sorted([0.0] * zeros + found)
