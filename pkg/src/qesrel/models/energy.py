"""Closed-form energies of the polynomial sectors."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .sector import Model, ModelSector

_REL = 1e-12


@dataclass(frozen=True)
class EnergyCandidate:
    energy: float
    decay: float
    relation_holds: bool   # unsquared coupling relation with decay >= 0
    bound: bool            # decay > 0, so exp(-decay t) is normalizable
    minus_branch: bool = False  # KG: the root -mu [Zv Zs + N sqrt(.)]/(Zv^2 + N^2)

    @property
    def valid(self) -> bool:
        return self.relation_holds and self.bound

    @property
    def flags(self) -> list[str]:
        out = []
        if not self.relation_holds:
            out.append("unsquared-relation-fails")
        if not self.bound:
            out.append("decay-not-positive")
        if self.minus_branch:
            out.append("minus-branch")
        return out


def dirac_energy(mu: float, c: float, z_delta: float, n: int, kappa: int) -> float:
    """E = [(mu + C) Z^2 - 4 mu (n + kappa)^2] / [4 (n + kappa)^2 + Z^2]."""
    k2 = 4.0 * (n + kappa) ** 2
    return ((mu + c) * z_delta**2 - mu * k2) / (k2 + z_delta**2)


def kg_energy_roots(mu: float, z_s: float, z_v: float, n: int, nu: int) -> list[float]:
    """Real roots of E^2 [N^2 + Zv^2] + 2 mu Zs Zv E + mu^2 (Zs^2 - N^2) = 0, N = n + nu."""
    N = n + nu
    a = N**2 + z_v**2
    b = 2.0 * mu * z_s * z_v
    cc = mu**2 * (z_s**2 - N**2)
    disc = b * b - 4.0 * a * cc
    if disc < 0:
        return []
    s = math.sqrt(disc)
    return sorted({(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)})


def kg_minus_branch(mu: float, z_s: float, z_v: float, n: int, nu: int) -> float | None:
    N = n + nu
    rad = z_v**2 - z_s**2 + N**2
    if rad < 0:
        return None
    return -mu * (z_v * z_s + N * math.sqrt(rad)) / (z_v**2 + N**2)


def energy_candidates(sector: ModelSector) -> list[EnergyCandidate]:
    """Energies compatible with the sector's couplings, each with validity flags.

    Dirac gives the single energy of the squared coupling relation; its
    ``relation_holds`` flag records whether gamma Z_delta = -2 sigma (n + kappa)
    holds with sigma >= 0.  Klein-Gordon gives both quadratic roots, each
    checked against (n + nu) xi = mu Z_s + E Z_v with xi = +sqrt(mu^2 - E^2).
    """
    if not sector.has_couplings:
        raise ValueError("energy_candidates needs the couplings")
    mu, n = sector.mu, sector.n
    if sector.kind is Model.DIRAC:
        E = dirac_energy(mu, sector.c, sector.z_delta, n, sector.kappa)
        gamma = mu - E + sector.c
        sq = (mu + E) * gamma
        if sq < 0:
            return []
        sigma = math.sqrt(sq)
        lhs = gamma * sector.z_delta
        rhs = -2.0 * sigma * (n + sector.kappa)
        holds = abs(lhs - rhs) <= _REL * max(1.0, abs(lhs), abs(rhs))
        return [EnergyCandidate(E, sigma, holds, sigma > 0)]

    nu = sector.nu
    minus = kg_minus_branch(mu, sector.z_s, sector.z_v, n, nu)
    out = []
    for E in kg_energy_roots(mu, sector.z_s, sector.z_v, n, nu):
        sq = mu * mu - E * E
        if sq < -_REL * mu * mu:
            continue
        xi = math.sqrt(max(sq, 0.0))
        lhs = (n + nu) * xi
        rhs = mu * sector.z_s + E * sector.z_v
        holds = abs(lhs - rhs) <= _REL * max(1.0, abs(lhs), abs(rhs))
        is_minus = minus is not None and abs(E - minus) <= _REL * max(1.0, abs(E))
        bound = xi > _REL * mu
        out.append(EnergyCandidate(E, xi, holds, bound, is_minus))
    return out
