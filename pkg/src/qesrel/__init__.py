"""Quasi-exact bound states of Dirac and Klein-Gordon equations with
soft-core Coulomb potentials, solved through Bethe roots."""

__version__ = "0.1.0"
