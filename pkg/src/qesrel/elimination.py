"""Exact elimination oracle for small polynomial solutions (n <= 2).

Writes S(t) = t^n - e1 t^(n-1) + ... in elementary symmetric functions,
expands the closure residual symbolically, and solves "every coefficient
vanishes" with a lex Groebner basis.  Back-substitution only ever solves
univariate problems of degree <= 3 (or degree <= 3 in a power t^k); larger
ones raise ``UnsupportedElimination``.  This path shares no code with the
Newton searches and is meant to check them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
import sympy as sp

__all__ = ["OdeFamily", "EliminationSolution", "UnsupportedElimination", "eliminate_small_n"]

_DPS = 50
_ZERO = mpmath.mpf("1e-35")


class UnsupportedElimination(ValueError):
    pass


@dataclass(frozen=True)
class OdeFamily:
    """P, Q, R as sympy expressions in ``t`` with unknown scalar parameters."""

    t: sp.Symbol
    P: sp.Expr
    Q: sp.Expr
    R: sp.Expr
    unknowns: tuple[sp.Symbol, ...] = ()


@dataclass(frozen=True)
class EliminationSolution:
    roots: tuple[float, ...]
    params: dict = field(hash=False)


def _univariate_roots(poly: sp.Poly) -> list[mpmath.mpf]:
    """Real roots of a univariate polynomial with degree <= 3 per factor."""
    x = poly.gens[0]
    out = []
    if poly.domain.is_Exact:
        _, factors = sp.factor_list(poly)
        pieces = [f for f, _ in factors]
    else:
        pieces = [poly]
    for f in pieces:
        f = sp.Poly(f, x)
        if f.degree() <= 0:
            continue
        exps = [m[0] for m in f.monoms() if m[0] > 0]
        step = int(sp.igcd(*exps)) if len(exps) > 1 else (exps[0] if exps else 1)
        if f.degree() // step > 3:
            raise UnsupportedElimination(f"eliminant of degree {f.degree()} in {x}")
        with mpmath.workdps(_DPS):
            coeffs = [mpmath.mpf(sp.Float(c, _DPS)) if not c.is_Rational else mpmath.mpf(c.p) / c.q
                      for c in f.all_coeffs()]
            while coeffs and abs(coeffs[0]) <= _ZERO:
                coeffs.pop(0)
            if len(coeffs) <= 1:
                continue
            for r in mpmath.polyroots(coeffs, maxsteps=200, extraprec=200):
                if abs(mpmath.im(r)) <= mpmath.mpf("1e-30") * max(1, abs(r)):
                    out.append(mpmath.re(r))
    return out


def eliminate_small_n(family: OdeFamily, n: int) -> list[EliminationSolution]:
    """Every real (roots, parameters) set making the closure residual vanish.

    Returned roots are real, pairwise distinct and ascending; parameters are
    keyed by symbol name.  Positivity or other physical filters are left to
    the caller.
    """
    if n not in (1, 2):
        raise UnsupportedElimination("elimination oracle supports n in {1, 2}")
    if len(family.unknowns) > 2:
        raise UnsupportedElimination("at most two unknown parameters")
    t = family.t
    es = sp.symbols(f"_e1:{n + 1}")
    S = t**n + sum((-1) ** k * es[k - 1] * t ** (n - k) for k in range(1, n + 1))
    expr = sp.expand(family.P * sp.diff(S, t, 2) + family.Q * sp.diff(S, t) + family.R * S)
    eqs = [c for c in sp.Poly(expr, t).all_coeffs() if c != 0]
    gens = list(es) + list(family.unknowns)
    if not eqs:
        raise UnsupportedElimination("residual vanishes identically")
    G = sp.groebner(eqs, *gens, order="lex")
    if list(G.exprs) == [1]:
        return []
    if not G.is_zero_dimensional:
        raise UnsupportedElimination("solution set is not finite")

    polys = [sp.Poly(g, *gens) for g in G.exprs]
    partial: list[dict] = [{}]
    for var in reversed(gens):
        later = gens[gens.index(var) + 1:]
        nxt = []
        for sol in partial:
            subs = {g: sp.Float(sol[g], _DPS) for g in later}
            cands = []
            for p in polys:
                used = {g for g in gens if p.degree(g) > 0}
                if var not in used or not used <= set([var, *later]):
                    continue
                u = sp.Poly(p.as_expr().subs(subs), var) if subs else sp.Poly(p.as_expr(), var)
                cands.append(u)
            cands = [c for c in cands if max(abs(x) for x in c.all_coeffs()) > 1e-30]
            if not cands:
                raise UnsupportedElimination(f"no equation pins {var}")
            lowest = min(cands, key=lambda c: c.degree())
            for r in _univariate_roots(lowest):
                ok = True
                with mpmath.workdps(_DPS):
                    for c in cands:
                        val = c.eval(sp.Float(r, _DPS))
                        mag = max(abs(x) for x in c.all_coeffs())
                        if abs(val) > 1e-25 * max(1, mag) * max(1, abs(r)) ** c.degree():
                            ok = False
                            break
                if ok:
                    new = dict(sol)
                    new[var] = r
                    nxt.append(new)
        partial = nxt

    out = []
    seen = set()
    for sol in partial:
        coeffs = [1] + [(-1) ** k * sol[es[k - 1]] for k in range(1, n + 1)]
        with mpmath.workdps(_DPS):
            rts = mpmath.polyroots(coeffs, maxsteps=200, extraprec=200)
        if any(abs(mpmath.im(r)) > mpmath.mpf("1e-30") for r in rts):
            continue
        roots = sorted(float(mpmath.re(r)) for r in rts)
        if any(abs(a - b) <= 1e-12 * max(1.0, abs(a)) for a, b in zip(roots, roots[1:])):
            continue
        params = {str(u): float(sol[u]) for u in family.unknowns}
        key = (tuple(round(r, 12) for r in roots), tuple(sorted((k, round(v, 12)) for k, v in params.items())))
        if key in seen:
            continue
        seen.add(key)
        out.append(EliminationSolution(tuple(roots), params))
    out.sort(key=lambda s: (s.roots, sorted(s.params.items())))
    return out
