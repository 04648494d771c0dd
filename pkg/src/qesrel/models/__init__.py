"""Dirac and Klein-Gordon sectors with soft-core Coulomb potentials."""

from .energy import EnergyCandidate, dirac_energy, energy_candidates, kg_energy_roots, kg_minus_branch
from .odes import build_ode, ode_coefficients, scaled_coupling, scaled_family
from .sector import (
    DerivedQuantities,
    Model,
    ModelSector,
    Policy,
    SectorError,
    SectorSolution,
    derive,
)
from .solve import ScaledSolution, certify_sector, constraint_residuals, solve_scaled, solve_sector
from .wavefunction import RadialWavefunction, WavefunctionTable, sample_wavefunction, wavefunction

__all__ = [
    "DerivedQuantities",
    "EnergyCandidate",
    "Model",
    "ModelSector",
    "Policy",
    "RadialWavefunction",
    "ScaledSolution",
    "SectorError",
    "SectorSolution",
    "WavefunctionTable",
    "build_ode",
    "certify_sector",
    "constraint_residuals",
    "derive",
    "dirac_energy",
    "energy_candidates",
    "kg_energy_roots",
    "kg_minus_branch",
    "ode_coefficients",
    "sample_wavefunction",
    "scaled_coupling",
    "scaled_family",
    "solve_scaled",
    "solve_sector",
    "wavefunction",
]
