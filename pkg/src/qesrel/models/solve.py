"""Sector solver: Bethe roots plus the parameter constraints they force.

Stage 1 works in scaled variables u_i = s t_i, w = s beta (s = sigma or xi),
where the equation no longer depends on the physical scale.  The unknowns
are (u, w) for Dirac and (u, w, lambda2) for Klein-Gordon; the equations
are the cleared Bethe residuals together with the R-coefficient identities
that do not involve the energy.  Dirac q=2 has one equation more than
unknowns and is solved by Gauss-Newton, accepting only exact solutions.

Stage 2 maps each scaled solution back to physical parameters under the
sector policy and certifies the result against the physical R.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .._newton import damped_newton
from ..polyvec import from_roots, roots_real_upto_cubic
from ..qes import (
    BetheSolution,
    DistinctnessError,
    SearchConfig,
    bethe_residuals,
    bethe_scale,
    closure_residual,
    closure_scale,
    r_from_roots,
    roots_distinct,
    solve_bethe,
)
from .energy import energy_candidates
from .odes import build_ode, ode_coefficients, scaled_coupling
from .sector import (
    Model,
    ModelSector,
    Policy,
    SectorError,
    SectorSolution,
    derive,
)

log = logging.getLogger(__name__)

__all__ = ["ScaledSolution", "solve_scaled", "solve_sector", "certify_sector", "constraint_residuals"]


@dataclass(frozen=True)
class ScaledSolution:
    u: tuple[float, ...]
    w: float
    lambda2: float | None
    residual: float


_DEGENERATE = 1e-4
_TANGENT = 1e-12


def _horner(coeffs, x):
    acc = np.zeros_like(x)
    for c in reversed(coeffs):
        c = np.asarray(c)
        acc = acc * x + (c[:, None] if c.ndim == 1 else c)
    return acc


def _stage1_residual(kind: Model, q: int, n: int, m: int, pinned: int):
    """Residual over x = (free roots, w) and the matching lambda2 map.

    The c1 identity is linear in lambda2 with coefficient -1 in both
    Klein-Gordon cases, so lambda2 is eliminated through it and only the c0
    identity remains.  Dirac q=1 has c2 = 0 on both sides and its c1 carries
    the energy, so again only c0 is imposed here; Dirac q=2 imposes c1 and c0.
    """
    g = scaled_coupling(kind, n, m)
    kg = kind is Model.KLEIN_GORDON
    free_n = n - pinned

    def parts(x):
        free = x[:, :free_n]
        w = x[:, free_n]
        u = np.concatenate([np.zeros((x.shape[0], pinned), dtype=x.dtype), free], axis=1)
        P, Q, R = ode_coefficients(kind, q, 1.0, w, m, g, 0.0 * w)
        a3, a2 = P[3], P[2]
        b3, b2, b1 = Q[3], Q[2], Q[1]
        s1 = u.sum(axis=1)
        s2 = (u * u).sum(axis=1)
        c1 = -(b3 * s1 + n * (n - 1) * a3 + n * b2)
        c0 = -(b3 * s2 + (2 * (n - 1) * a3 + b2) * s1 + n * (n - 1) * a2 + n * b1)
        return free, u, w, P, Q, R, c1, c0

    def lambda2(x):
        _, _, _, _, _, R, c1, _ = parts(x)
        return R[1] - c1

    def fun(x: np.ndarray) -> np.ndarray:
        free, u, w, P, Q, R, c1, c0 = parts(x)
        if kg:
            lam2 = R[1] - c1
            R = ode_coefficients(kind, q, 1.0, w, m, g, lam2)[2]
            ident = [R[0] - c0]
        elif q == 1:
            ident = [R[0] - c0]
        else:
            ident = [R[1] - c1, R[0] - c0]
        diff = free[:, :, None] - u[:, None, :]
        mask = np.ones((free_n, n), dtype=bool)
        mask[np.arange(free_n), np.arange(free_n) + pinned] = False
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(mask, 1.0 / np.where(mask, diff, 1.0), 0.0)
        bethe = 2.0 * _horner(P, free) * inv.sum(axis=2) + _horner(Q, free)
        return np.concatenate([bethe, np.stack(ident, axis=1)], axis=1)

    return fun, lambda2


@functools.lru_cache(maxsize=256)
def solve_scaled(kind: Model, q: int, n: int, m: int, cfg: SearchConfig = SearchConfig()) -> tuple[ScaledSolution, ...]:
    """Stage-1 solutions with w > 0 and distinct real roots, canonically sorted.

    For q = 1 the origin is a shared zero of P and Q; a root sitting there
    satisfies its Bethe equation identically and makes the square system
    singular, so that placement is handled as a separate pinned branch.
    """
    kind = Model(kind)
    kg = kind is Model.KLEIN_GORDON
    rng = np.random.default_rng(cfg.seed)
    rho = 1.0 + n + abs(m)
    box = cfg.box_scale * rho
    branches = (0, 1) if q == 1 else (0,)
    found: list[tuple[tuple[float, ...], float, float | None, float]] = []
    for pinned in branches:
        free_n = n - pinned
        fun, lambda2 = _stage1_residual(kind, q, n, m, pinned)
        k = cfg.n_starts(free_n + 1)
        # log-uniform magnitudes so that both O(1) and O(box) solutions are seeded
        mag = box * 10.0 ** rng.uniform(-2.0, 0.0, size=(k, free_n + 1))
        sign = rng.choice([-1.0, 1.0], size=mag.shape)
        sign[:, free_n] = 1.0
        starts = sign * mag
        run = damped_newton(
            fun, starts,
            max_iter=cfg.max_iter, max_halvings=cfg.max_halvings,
            step_tol=cfg.step_tol, residual_tol=cfg.residual_tol,
        )
        for x, r in zip(run.x, run.residual):
            if not np.isfinite(r):
                continue
            xmax = max(1.0, float(np.max(np.abs(x))))
            if r > cfg.accept_tol * xmax**3:
                continue
            free = list(x[:free_n])
            w = float(x[free_n])
            # Newton stalls near two singular limits, w -> 0 and a pair of
            # roots merging; true solutions sit well away from both.
            if w <= _DEGENERATE * rho:
                continue
            if q == 1 and any(abs(v) <= 1e-6 for v in free):
                continue  # belongs to the pinned branch
            u = tuple(sorted([0.0] * pinned + free))
            if roots_distinct(u, _DEGENERATE) is not None:
                continue
            lam2 = float(lambda2(x[None, :])[0]) if kg else None
            found.append((u, w, lam2, float(r)))

    out: list[ScaledSolution] = []
    for u, w, lam2, r in sorted(found):
        vec = np.array(list(u) + [w] + ([lam2] if kg else []))
        dup = False
        for s in out:
            other = np.array(list(s.u) + [s.w] + ([s.lambda2] if kg else []))
            if np.linalg.norm(vec - other) <= cfg.dedup_tol * (1.0 + np.linalg.norm(vec)):
                dup = True
                break
        if not dup:
            out.append(ScaledSolution(u, w, lam2, r))
    return tuple(out)


def _close(a: float, b: float, tol: float = 1e-9) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def certify_sector(sector: ModelSector, energy: float, roots, tol: float = 1e-10) -> SectorSolution:
    """Rebuild everything from (sector, E, roots) and run both certificates."""
    derived = derive(sector, energy)
    ode = build_ode(sector, derived)
    roots = tuple(sorted(float(r) for r in roots))
    diags: list[str] = []
    S = from_roots(roots)
    try:
        bres = bethe_residuals(ode.P, ode.Q, roots)
        bnorm = float(np.max(np.abs(bres))) if roots else 0.0
        bok = bnorm <= tol * bethe_scale(ode.P, ode.Q, roots)
    except DistinctnessError as exc:
        diags.append(str(exc))
        bnorm, bok = math.inf, False
    cnorm = closure_residual(ode, S).max_abs()
    cok = cnorm <= tol * closure_scale(ode, S)
    c = r_from_roots(ode.P, ode.Q, len(roots), roots)
    bethe = BetheSolution(len(roots), roots, c, bnorm, cnorm, tol)
    if sector.q == 2 and len(roots) == 1:
        diags.extend(_cubic_root_report(ode))
    sol = SectorSolution(sector, derived, bethe, {}, bok and cok, tuple(diags))
    resid = constraint_residuals(sol)
    return SectorSolution(sector, derived, bethe, resid, bok and cok, tuple(diags))


def _cubic_root_report(ode) -> list[str]:
    # n=1: every real zero of Q solves the Bethe equation, but only one closes the ODE
    lines = []
    for r in roots_real_upto_cubic(ode.Q):
        res = closure_residual(ode, from_roots([r])).max_abs()
        lines.append(f"cubic root t={r!r}: closure residual {res:.1e}")
    return lines


def constraint_residuals(solution: SectorSolution) -> dict[str, float]:
    """Named parameter constraints evaluated on a solution.

    Always present: ``coupling_identity`` and ``mass_shell`` (plus
    ``lambda2_couplings`` for Klein-Gordon).  Case-specific entries:

    * q=1, n=1: ``cutoff_linear``
    * q=2, n=1: ``cutoff_squared`` and ``coupling_cutoff_squared``
    * KG q=1: ``lambda2_zero``; KG q=2, n=1: ``lambda2_root``
    * q=1, n=2: ``n2_quadratic`` and ``n2_root_quadratic`` (both vanish on
      solutions) and ``n2_alternative``, a differently-derived condition
      kept for comparison that does not vanish on certified solutions.
    """
    sec, d = solution.sector, solution.derived
    n, m, q = sec.n, sec.m, sec.q
    s, beta, E = d.decay, sec.beta, d.energy
    w = s * beta
    roots = solution.roots
    out: dict[str, float] = {}
    if sec.kind is Model.DIRAC:
        gz = d.gamma * sec.z_delta
        out["coupling_identity"] = gz + 2.0 * s * (n + m)
        out["mass_shell"] = s * s - (sec.mu + E) * d.gamma
        if q == 1 and n == 1:
            out["cutoff_linear"] = beta * (2.0 * s + gz) + 2.0 * m
        if q == 2 and n == 1:
            out["cutoff_squared"] = w * w - 2.0 * (m + 1)
            out["coupling_cutoff_squared"] = gz * gz * beta * beta - (2.0 * m + 2.0) ** 3
        if q == 1 and n == 2:
            out["n2_alternative"] = (
                gz**2 * beta**2 * (m**2 + 7 * m + 11)
                + 2.0 * gz * beta * (3 * m**3 + 15 * m**2 + 22 * m + 8)
                + 4.0 * m * (m + 1) * (m + 2) ** 2
            )
    else:
        lam1, lam2 = d.lambda1, d.lambda2
        out["coupling_identity"] = lam1 - 2.0 * s * (n + m)
        out["mass_shell"] = s * s - (sec.mu**2 - E * E)
        out["lambda2_couplings"] = lam2 - (sec.z_s**2 - sec.z_v**2)
        if q == 1:
            out["lambda2_zero"] = lam2
            if n == 1:
                out["cutoff_linear"] = beta * lam1 - 2.0 * (m + 1)
            if n == 2:
                out["n2_alternative"] = (
                    m * (m + 1) * beta**2 * lam1**2
                    - (m + 2) * (6 * m**2 + 4 * m - 1) * beta * lam1
                    + (m + 2) ** 2 * (8 * m**2 - 2 * m - 1)
                )
        if q == 2 and n == 1:
            out["cutoff_squared"] = w * w - 2.0 * (m + 1)
            out["coupling_cutoff_squared"] = beta**2 * lam1**2 - 8.0 * (m + 1) ** 3
            if roots:
                out["lambda2_root"] = lam2 - (2.0 * m - 2.0 * s * roots[0])
    if q == 1 and n == 2:
        out["n2_quadratic"] = (m + 1) * w * w - 3.0 * (m + 1) * w + (2 * m + 1)
        if roots:
            e = max(roots, key=abs)
            out["n2_root_quadratic"] = s * e * e - (1.0 + m + w) * e + beta
    return out


def _map_solve_beta(sector: ModelSector, sc: ScaledSolution, diag: list[str]):
    """(concrete sector, energy, roots) triples for given couplings."""
    out = []
    for cand in energy_candidates(sector):
        if not cand.valid:
            diag.append(f"energy E={cand.energy!r} dropped: {', '.join(cand.flags)}")
            continue
        s = cand.decay
        if sector.kind is Model.KLEIN_GORDON:
            lam2 = sector.z_s**2 - sector.z_v**2
            if not _close(lam2, sc.lambda2):
                diag.append(
                    f"E={cand.energy!r}, w={sc.w!r}: needs lambda2={sc.lambda2!r} but couplings give {lam2!r}"
                )
                continue
        beta = sc.w / s
        out.append((sector.with_(beta=beta), cand.energy, [u / s for u in sc.u]))
    return out


def _map_solve_coupling(sector: ModelSector, sc: ScaledSolution, diag: list[str]):
    beta = sector.beta
    s = sc.w / beta
    mu = sector.mu
    out = []
    if sector.kind is Model.DIRAC:
        c = sector.c
        # (mu + E)(mu + c - E) = sigma^2
        disc = c * c + 4.0 * (mu * (mu + c) - s * s)
        tol = _TANGENT * max(1.0, c * c, mu * mu)
        if disc < -tol:
            diag.append(f"w={sc.w!r}: sigma={s!r} admits no real energy")
            return out
        # a tangent (double) energy root is split by rounding into a close pair
        r = math.sqrt(disc) if disc > tol else 0.0
        for E in sorted({(c - r) / 2.0, (c + r) / 2.0}):
            gamma = mu - E + c
            if gamma == 0.0:
                diag.append(f"w={sc.w!r}: gamma vanishes at E={E!r}")
                continue
            z_delta = -2.0 * s * (sector.n + sector.kappa) / gamma
            out.append((sector.with_(z_delta=z_delta), E, [u / s for u in sc.u]))
        return out

    if s > mu * (1.0 + _TANGENT):
        diag.append(f"w={sc.w!r}: xi={s!r} exceeds mu, no bound state")
        return out
    s = min(s, mu)
    L = s * (sector.n + sector.nu)
    lam2 = sc.lambda2
    e0 = math.sqrt(max(mu * mu - s * s, 0.0))
    for E in sorted({-e0, e0}):
        # mu Zs + E Zv = L and Zs^2 - Zv^2 = lam2, eliminated for Zv
        a, b, cc = -s * s, -2.0 * L * E, L * L - lam2 * mu * mu
        disc = b * b - 4.0 * a * cc
        tol = _TANGENT * max(1.0, b * b, abs(a * cc))
        if disc < -tol:
            diag.append(f"w={sc.w!r}: no real couplings at E={E!r}")
            continue
        r = math.sqrt(disc) if disc > tol else 0.0
        for zv in sorted({(-b - r) / (2.0 * a), (-b + r) / (2.0 * a)}):
            zs = (L - E * zv) / mu
            out.append((sector.with_(z_s=zs, z_v=zv), E, [u / s for u in sc.u]))
    return out


def _check(sector: ModelSector, cfg: SearchConfig, diag: list[str]) -> list[SectorSolution]:
    certified, others = [], []
    for cand in energy_candidates(sector):
        if not cand.bound:
            diag.append(f"energy E={cand.energy!r} skipped: {', '.join(cand.flags)}")
            continue
        if not cand.relation_holds:
            diag.append(f"energy E={cand.energy!r}: {', '.join(cand.flags)}")
        derived = derive(sector, cand.energy)
        ode = build_ode(sector, derived)
        for b in solve_bethe(ode.P, ode.Q, sector.n, cfg, diag):
            sol = certify_sector(sector, cand.energy, b.roots, cfg.accept_tol)
            (certified if sol.certified else others).append(sol)
    if certified:
        return certified
    if not others:
        diag.append("no Bethe root set found for the given parameters")
    else:
        diag.append("given parameters are inconsistent: no root set passes the physical closure check")
    others.sort(key=lambda s: s.bethe.closure_residual_norm)
    return others


def solve_sector(
    sector: ModelSector,
    cfg: SearchConfig | None = None,
    diagnostics: list[str] | None = None,
) -> list[SectorSolution]:
    """All polynomial solutions of a sector under its policy.

    Under ``solve-beta`` and ``solve-coupling`` only certified solutions are
    returned.  Under ``check`` the certified root sets are returned if there
    are any; otherwise the uncertified candidates (best first) so callers can
    report how far off the given parameters are.
    """
    cfg = cfg or SearchConfig()
    diag = diagnostics if diagnostics is not None else []
    if sector.policy is Policy.CHECK:
        return _check(sector, cfg, diag)

    scaled = solve_scaled(sector.kind, sector.q, sector.n, sector.m, cfg)
    if not scaled:
        diag.append(f"no scaled solution for {sector.kind.value} q={sector.q} n={sector.n} m={sector.m}")
        return []
    mapper = _map_solve_beta if sector.policy is Policy.SOLVE_BETA else _map_solve_coupling
    out: list[SectorSolution] = []
    for sc in scaled:
        try:
            mapped = mapper(sector, sc, diag)
        except SectorError as exc:
            diag.append(str(exc))
            continue
        for concrete, E, roots in mapped:
            try:
                sol = certify_sector(concrete, E, roots, cfg.accept_tol)
            except SectorError as exc:
                diag.append(str(exc))
                continue
            if sol.certified:
                out.append(sol)
            else:
                diag.append(f"w={sc.w!r}, E={E!r}: failed physical certification")
    for msg in diag:
        log.debug(msg)
    return out
