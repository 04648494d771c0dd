"""Polynomial solutions of P(t) S'' + Q(t) S' + R(t) S = 0 via Bethe roots.

For given P, Q (degree <= 3) a monic degree-n solution S = prod(t - t_i)
with distinct roots exists iff the roots solve the cleared Bethe system

    2 P(t_i) sum_{j != i} 1/(t_i - t_j) + Q(t_i) = 0,

and then R (degree <= 2) is fixed by the roots through ``r_from_roots``.
Two certificates are provided: the Bethe residual vector and the fully
expanded closure residual ``P S'' + Q S' + R S``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._newton import damped_newton
from .polyvec import Poly, from_roots, roots_real_upto_cubic

log = logging.getLogger(__name__)

__all__ = [
    "QesOde",
    "BetheSolution",
    "SearchConfig",
    "DistinctnessError",
    "r_from_roots",
    "bethe_residuals",
    "bethe_scale",
    "closure_residual",
    "closure_scale",
    "roots_distinct",
    "common_real_zeros",
    "solve_bethe",
]

ACCEPT_TOL = 1e-10


class DistinctnessError(ValueError):
    """Two Bethe roots coincide within the distinctness tolerance."""

    def __init__(self, i: int, j: int, ti: float, tj: float):
        super().__init__(f"roots t_{i} = {ti!r} and t_{j} = {tj!r} are not distinct")
        self.pair = (i, j)


@dataclass(frozen=True)
class QesOde:
    P: Poly
    Q: Poly
    R: Poly
    n: int = 0

    def __post_init__(self):
        if self.P.degree() > 3 or self.Q.degree() > 3 or self.R.degree() > 2:
            raise ValueError(
                "QesOde needs deg P <= 3, deg Q <= 3, deg R <= 2; got "
                f"{self.P.degree()}, {self.Q.degree()}, {self.R.degree()}"
            )
        if self.n < 0:
            raise ValueError("target degree n must be non-negative")

    # coefficient accessors a_k, b_k, c_k; absent ones read as 0
    def a(self, k: int) -> float:
        return self.P.coeff(k)

    def b(self, k: int) -> float:
        return self.Q.coeff(k)

    def c(self, k: int) -> float:
        return self.R.coeff(k)

    def scale(self) -> float:
        return max(self.P.max_abs(), self.Q.max_abs(), self.R.max_abs())

    def apply(self, S: Poly) -> Poly:
        return closure_residual(self, S)


@dataclass(frozen=True)
class BetheSolution:
    n: int
    roots: tuple[float, ...]
    c_coeffs: tuple[float, float, float]
    bethe_residual_norm: float
    closure_residual_norm: float
    tolerance: float = ACCEPT_TOL

    @property
    def S(self) -> Poly:
        return from_roots(self.roots)

    @property
    def R(self) -> Poly:
        c2, c1, c0 = self.c_coeffs
        return Poly([c0, c1, c2])


@dataclass(frozen=True)
class SearchConfig:
    """Multi-start settings for the Bethe and sector searches."""

    starts_per_unknown: int = 60
    max_starts: int = 200
    box_scale: float = 10.0
    seed: int = 42
    max_iter: int = 100
    max_halvings: int = 40
    step_tol: float = 1e-14
    residual_tol: float = 1e-12
    accept_tol: float = ACCEPT_TOL
    dedup_tol: float = 1e-8
    distinct_tol: float = 1e-8

    def n_starts(self, unknowns: int) -> int:
        return min(self.max_starts, self.starts_per_unknown * unknowns)


def r_from_roots(P: Poly, Q: Poly, n: int, roots: Sequence[float]) -> tuple[float, float, float]:
    """The (c2, c1, c0) for which prod(t - t_i) can solve the equation."""
    if len(roots) != n:
        raise ValueError(f"expected {n} roots, got {len(roots)}")
    a3, a2 = P.coeff(3), P.coeff(2)
    b3, b2, b1 = Q.coeff(3), Q.coeff(2), Q.coeff(1)
    s1 = float(sum(roots))
    s2 = float(sum(r * r for r in roots))
    c2 = -n * b3
    c1 = -(b3 * s1 + n * (n - 1) * a3 + n * b2)
    c0 = -(b3 * s2 + (2 * (n - 1) * a3 + b2) * s1 + n * (n - 1) * a2 + n * b1)
    return (c2 + 0.0, c1 + 0.0, c0 + 0.0)


def roots_distinct(roots: Sequence[float], tol: float = 1e-8) -> tuple[int, int] | None:
    """First pair of indices closer than ``tol`` (relative), or None."""
    for i, j in itertools.combinations(range(len(roots)), 2):
        ti, tj = roots[i], roots[j]
        if abs(ti - tj) <= tol * max(1.0, abs(ti), abs(tj)):
            return i, j
    return None


def bethe_residuals(P: Poly, Q: Poly, roots: Sequence[float], tol: float = 1e-8) -> np.ndarray:
    """Cleared Bethe residuals 2 P(t_i) sum_j 1/(t_i - t_j) + Q(t_i)."""
    roots = [float(r) for r in roots]
    pair = roots_distinct(roots, tol)
    if pair is not None:
        i, j = pair
        raise DistinctnessError(i + 1, j + 1, roots[i], roots[j])
    out = np.empty(len(roots))
    for i, ti in enumerate(roots):
        s = sum(1.0 / (ti - tj) for j, tj in enumerate(roots) if j != i)
        out[i] = 2.0 * P(ti) * s + Q(ti)
    return out


def bethe_scale(P: Poly, Q: Poly, roots: Sequence[float]) -> float:
    """Magnitude against which Bethe residual entries are judged."""
    rmax = max((abs(r) for r in roots), default=0.0)
    return max(1.0, P.max_abs(), Q.max_abs()) * max(1.0, rmax) ** 3


def closure_residual(ode: QesOde, S: Poly) -> Poly:
    """Expanded P S'' + Q S' + R S; identically zero iff S solves the ODE."""
    return ode.P * S.deriv(2) + ode.Q * S.deriv() + ode.R * S


def closure_scale(ode: QesOde, S: Poly) -> float:
    """Largest absolute input coefficient (at least 1)."""
    return max(1.0, ode.scale(), S.max_abs())


def common_real_zeros(P: Poly, Q: Poly, tol: float = 1e-12) -> list[float]:
    """Distinct real zeros shared by P and Q.

    A root placed at such a point satisfies its own cleared Bethe equation
    for any position of the others, so the searches treat it as a pinned
    branch instead of iterating on it.
    """
    if P.degree() < 1:
        return []
    scale = max(1.0, P.max_abs(), Q.max_abs())
    out: list[float] = []
    for z in roots_real_upto_cubic(P):
        if abs(Q(z)) <= tol * scale * max(1.0, abs(z)) ** 3:
            if not any(abs(z - y) <= 1e-12 * max(1.0, abs(y)) for y in out):
                out.append(z)
    return out


def _bethe_batch(P: Poly, Q: Poly, pinned: Sequence[float]):
    pc = np.array(P.coeffs or (0.0,))
    qc = np.array(Q.coeffs or (0.0,))
    pinned = np.asarray(pinned, dtype=float)

    def horner(c, x):
        acc = np.zeros_like(x)
        for ck in c[::-1]:
            acc = acc * x + ck
        return acc

    def fun(x: np.ndarray) -> np.ndarray:
        if pinned.size:
            full = np.concatenate([np.broadcast_to(pinned, (x.shape[0], pinned.size)).astype(x.dtype), x], axis=1)
        else:
            full = x
        diff = x[:, :, None] - full[:, None, :]
        k = pinned.size
        m = x.shape[1]
        mask = np.ones(diff.shape[1:], dtype=bool)
        mask[np.arange(m), np.arange(m) + k] = False
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(mask, 1.0 / np.where(mask, diff, 1.0), 0.0)
        return 2.0 * horner(pc, x) * inv.sum(axis=2) + horner(qc, x)

    return fun


def _cauchy_bound(p: Poly) -> float:
    if p.degree() < 1:
        return 0.0
    lead = p.coeffs[-1]
    return max(abs(c / lead) for c in p.coeffs[:-1])


def _dedup(cands: list[tuple[float, ...]], tol: float) -> list[tuple[float, ...]]:
    kept: list[tuple[float, ...]] = []
    for c in sorted(cands):
        v = np.array(c)
        if not any(np.linalg.norm(v - np.array(k)) <= tol * (1.0 + np.linalg.norm(v)) for k in kept):
            kept.append(c)
    return kept


def solve_bethe(
    P: Poly,
    Q: Poly,
    n: int,
    cfg: SearchConfig | None = None,
    diagnostics: list[str] | None = None,
) -> list[BetheSolution]:
    """All real, distinct Bethe root sets found by seeded multi-start Newton.

    Real common zeros of P and Q are tried as pinned roots (each subset of
    them is its own branch); the remaining roots are iterated on.  Every
    accepted root set is certified by the closure residual with R taken from
    ``r_from_roots``.  Returns an empty list when nothing converges.
    """
    cfg = cfg or SearchConfig()
    diag = diagnostics if diagnostics is not None else []
    if n < 1:
        raise ValueError("solve_bethe needs n >= 1")
    rho = 1.0 + max(_cauchy_bound(P), _cauchy_bound(Q))
    rng = np.random.default_rng(cfg.seed)
    zeros = common_real_zeros(P, Q)

    candidates: list[tuple[float, ...]] = []
    for k in range(0, min(len(zeros), n) + 1):
        for pinned in itertools.combinations(zeros, k):
            free = n - k
            if free == 0:
                candidates.append(tuple(sorted(pinned)))
                continue
            shape = (cfg.n_starts(free), free)
            # log-uniform magnitudes seed roots on every scale up to the box
            starts = rng.choice([-1.0, 1.0], size=shape) * cfg.box_scale * rho * 10.0 ** rng.uniform(-3.0, 0.0, size=shape)
            run = damped_newton(
                _bethe_batch(P, Q, pinned),
                starts,
                max_iter=cfg.max_iter,
                max_halvings=cfg.max_halvings,
                step_tol=cfg.step_tol,
                residual_tol=cfg.residual_tol,
            )
            if run.singular.any():
                diag.append(f"bethe n={n} pinned={list(pinned)}: {int(run.singular.sum())} starts abandoned (singular Jacobian)")
            for x, r in zip(run.x, run.residual):
                if not np.isfinite(r):
                    continue
                # free roots landing on a shared zero belong to a pinned branch
                if any(abs(xi - z) <= 1e-6 * max(1.0, abs(z)) for xi in x for z in zeros):
                    continue
                candidates.append(tuple(sorted(list(pinned) + list(x))))

    out: list[BetheSolution] = []
    for roots in _dedup(candidates, cfg.dedup_tol):
        pair = roots_distinct(roots, cfg.distinct_tol)
        if pair is not None:
            diag.append(f"bethe n={n}: rejected near-confluent candidate {list(roots)}")
            continue
        sol = certify_roots(P, Q, roots, tol=cfg.accept_tol)
        if sol is not None:
            out.append(sol)
    out.sort(key=lambda s: s.roots)
    return out


def certify_roots(P: Poly, Q: Poly, roots: Sequence[float], tol: float = ACCEPT_TOL) -> BetheSolution | None:
    """BetheSolution for ``roots`` if both certificates pass, else None."""
    roots = tuple(float(r) for r in roots)
    n = len(roots)
    try:
        bres = bethe_residuals(P, Q, roots)
    except DistinctnessError:
        return None
    bnorm = float(np.max(np.abs(bres))) if n else 0.0
    c = r_from_roots(P, Q, n, roots)
    ode = QesOde(P, Q, Poly([c[2], c[1], c[0]]), n)
    S = from_roots(roots)
    cnorm = closure_residual(ode, S).max_abs()
    if bnorm > tol * bethe_scale(P, Q, roots) or cnorm > tol * closure_scale(ode, S):
        return None
    return BetheSolution(n, roots, c, bnorm, cnorm, tol)
