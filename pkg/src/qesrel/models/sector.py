"""Problem and result records for the Dirac and Klein-Gordon sectors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from ..qes import BetheSolution


class SectorError(ValueError):
    """Invalid or inconsistent sector specification."""


class Model(str, Enum):
    DIRAC = "dirac"
    KLEIN_GORDON = "kg"


class Policy(str, Enum):
    SOLVE_BETA = "solve-beta"          # couplings given, cut-off solved for
    SOLVE_COUPLING = "solve-coupling"  # cut-off given, couplings solved for
    CHECK = "check"                    # everything given, verify only


@dataclass(frozen=True)
class ModelSector:
    """One (model, q, n, angular number) problem with its physical inputs.

    Units are hbar = c = e = 1.  Dirac sectors use ``kappa``, ``c`` (the
    pseudospin constant) and ``z_delta = Z_v - Z_s``; Klein-Gordon sectors
    use ``ell`` and the pair ``z_s``, ``z_v``.
    """

    kind: Model
    q: int
    n: int
    mu: float
    kappa: Optional[int] = None
    ell: Optional[int] = None
    c: float = 0.0
    z_delta: Optional[float] = None
    z_s: Optional[float] = None
    z_v: Optional[float] = None
    beta: Optional[float] = None
    policy: Policy = Policy.SOLVE_BETA
    allow_any_kappa: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", Model(self.kind))
        object.__setattr__(self, "policy", Policy(self.policy))
        if self.q not in (1, 2):
            raise SectorError(f"q must be 1 or 2, got {self.q}")
        if not isinstance(self.n, int) or self.n < 1:
            raise SectorError(f"n must be a positive integer, got {self.n}")
        if not self.mu > 0:
            raise SectorError("mass mu must be positive")
        if self.beta is not None and not self.beta > 0:
            raise SectorError("cut-off beta must be positive")
        if self.kind is Model.DIRAC:
            if self.ell is not None or self.z_s is not None or self.z_v is not None:
                raise SectorError("ell, z_s and z_v are Klein-Gordon inputs")
            if self.kappa is None or self.kappa == 0:
                raise SectorError("Dirac sectors need a nonzero integer kappa")
            if self.kappa < 1 and not self.allow_any_kappa:
                raise SectorError("kappa >= 1 required for a regular lower component (override with allow_any_kappa)")
        else:
            if self.kappa is not None or self.z_delta is not None or self.c != 0.0:
                raise SectorError("kappa, c and z_delta are Dirac inputs")
            if self.ell is None or self.ell < 0:
                raise SectorError("Klein-Gordon sectors need ell >= 0")
            if (self.z_s is None) != (self.z_v is None):
                raise SectorError("give both z_s and z_v or neither")
        needs_coupling = self.policy in (Policy.SOLVE_BETA, Policy.CHECK)
        if needs_coupling and not self.has_couplings:
            raise SectorError(f"policy {self.policy.value} needs the couplings")
        if self.policy in (Policy.SOLVE_COUPLING, Policy.CHECK) and self.beta is None:
            raise SectorError(f"policy {self.policy.value} needs beta")

    @property
    def has_couplings(self) -> bool:
        if self.kind is Model.DIRAC:
            return self.z_delta is not None
        return self.z_s is not None and self.z_v is not None

    @property
    def m(self) -> int:
        """kappa for Dirac, nu = ell + 1 for Klein-Gordon."""
        return self.kappa if self.kind is Model.DIRAC else self.ell + 1

    @property
    def nu(self) -> Optional[int]:
        return None if self.ell is None else self.ell + 1

    def with_(self, **changes) -> "ModelSector":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "q": self.q,
            "n": self.n,
            "mu": self.mu,
            "kappa": self.kappa,
            "ell": self.ell,
            "c": self.c,
            "z_delta": self.z_delta,
            "z_s": self.z_s,
            "z_v": self.z_v,
            "beta": self.beta,
            "policy": self.policy.value,
            "allow_any_kappa": self.allow_any_kappa,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSector":
        return cls(**d)


@dataclass(frozen=True)
class DerivedQuantities:
    """Energy and the quantities built from it.

    ``decay`` is sigma (Dirac) or xi (Klein-Gordon) and is also the
    exponential decay rate of the radial function.
    """

    energy: float
    decay: float
    gamma: Optional[float] = None
    lambda1: Optional[float] = None
    lambda2: Optional[float] = None

    @property
    def sigma(self) -> float:
        return self.decay

    @property
    def xi(self) -> float:
        return self.decay

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "decay": self.decay,
            "gamma": self.gamma,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DerivedQuantities":
        return cls(**d)


def derive(sector: ModelSector, energy: float) -> DerivedQuantities:
    """Recompute every derived quantity from the sector and an energy.

    The decay rate is the non-negative square root; a negative radicand
    raises ``SectorError``.
    """
    if sector.kind is Model.DIRAC:
        gamma = sector.mu - energy + sector.c
        sq = (sector.mu + energy) * gamma
        if sq < 0:
            raise SectorError(f"sigma^2 = {sq!r} < 0 at E = {energy!r}")
        return DerivedQuantities(energy, math.sqrt(sq), gamma=gamma)
    sq = sector.mu**2 - energy**2
    if sq < 0:
        raise SectorError(f"xi^2 = {sq!r} < 0 at E = {energy!r}")
    lam1 = 2.0 * (sector.mu * sector.z_s + energy * sector.z_v)
    lam2 = sector.z_s**2 - sector.z_v**2
    return DerivedQuantities(energy, math.sqrt(sq), lambda1=lam1, lambda2=lam2)


@dataclass(frozen=True)
class SectorSolution:
    sector: ModelSector
    derived: DerivedQuantities
    bethe: BetheSolution
    constraint_residuals: dict = field(hash=False)
    certified: bool
    diagnostics: tuple[str, ...] = ()

    @property
    def roots(self) -> tuple[float, ...]:
        return self.bethe.roots

    @property
    def beta(self) -> float:
        return self.sector.beta

    @property
    def w(self) -> float:
        """Dimensionless cut-off decay * beta."""
        return self.derived.decay * self.sector.beta
