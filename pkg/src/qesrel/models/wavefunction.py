"""Radial functions assembled from a certified sector solution."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import simpson

from ..polyvec import Poly, from_roots
from .sector import Model, SectorSolution


@dataclass(frozen=True)
class RadialWavefunction:
    """r^p exp(-s t) S(t) with t = (r^q + beta^q)^(1/q).

    For Dirac this is the lower component G and ``gamma`` is kept to
    recover the upper component F; for Klein-Gordon it is phi.
    """

    kind: Model
    q: int
    n: int
    prefactor_power: float
    decay_rate: float
    poly_factor: Poly
    beta: float
    gamma: Optional[float] = None

    def t(self, r):
        r = np.asarray(r, dtype=float)
        return (r**self.q + self.beta**self.q) ** (1.0 / self.q)

    def value(self, r):
        """G(r) for Dirac, phi(r) for Klein-Gordon."""
        r = np.asarray(r, dtype=float)
        t = self.t(r)
        return r**self.prefactor_power * np.exp(-self.decay_rate * t) * self.poly_factor(t)

    def upper(self, r):
        """Dirac upper component F = (G' - kappa G / r) / gamma."""
        if self.kind is not Model.DIRAC:
            raise ValueError("upper component exists only for Dirac")
        r = np.asarray(r, dtype=float)
        t = self.t(r)
        dt_dr = (r / t) ** (self.q - 1)
        S, dS = self.poly_factor(t), self.poly_factor.deriv()(t)
        return (
            r**self.prefactor_power * np.exp(-self.decay_rate * t)
            * (dS - self.decay_rate * S) * dt_dr / self.gamma
        )

    def node_count(self) -> int:
        """Radial nodes on (0, inf): Bethe roots lying above the cut-off."""
        roots = np.roots(self.poly_factor.coeffs[::-1]) if self.poly_factor.degree() > 0 else []
        return sum(1 for z in roots if abs(z.imag) < 1e-9 and z.real > self.beta)


def wavefunction(solution: SectorSolution) -> RadialWavefunction:
    sec, d = solution.sector, solution.derived
    if sec.kind is Model.DIRAC:
        if d.gamma == 0:
            raise ValueError("gamma = 0: the upper component is singular")
        power = float(sec.kappa)
    else:
        power = float(sec.ell + 1)
    return RadialWavefunction(
        kind=sec.kind, q=sec.q, n=sec.n, prefactor_power=power,
        decay_rate=d.decay, poly_factor=from_roots(solution.roots),
        beta=sec.beta, gamma=d.gamma,
    )


@dataclass(frozen=True)
class WavefunctionTable:
    columns: tuple[str, ...]
    rows: np.ndarray  # shape (points, len(columns))


def sample_wavefunction(
    wf: RadialWavefunction,
    r_max: float | None = None,
    points: int = 400,
    normalize: bool = False,
) -> WavefunctionTable:
    """Sample on the uniform grid r_k = k r_max / points, k = 1..points.

    With ``normalize`` the columns are scaled so the composite-Simpson
    integral of the squared radial function(s) over the grid is 1.  The
    default ``r_max`` is 30 / decay_rate.
    """
    if r_max is None:
        r_max = 30.0 / wf.decay_rate
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    if points < 2:
        raise ValueError("need at least 2 grid points")
    r = r_max * np.arange(1, points + 1) / points
    if wf.kind is Model.DIRAC:
        cols = ("r", "G", "F")
        vals = [wf.value(r), wf.upper(r)]
    else:
        cols = ("r", "phi")
        vals = [wf.value(r)]
    if normalize:
        norm = simpson(sum(v * v for v in vals), x=r)
        vals = [v / np.sqrt(norm) for v in vals]
    return WavefunctionTable(cols, np.column_stack([r, *vals]))
