"""Inverse-scattering tools for coupling quenches in the one-dimensional
nonlinear Schrodinger equation."""

from .core import (
    Coupling,
    DiscreteEigenvalue,
    FieldProfile,
    FiniteDensity,
    KGrid,
    NlsQuenchError,
    QuenchReport,
    ScatteringData,
    Schwartz,
    classify_regime,
    make_kgrid,
    make_profile,
)

__all__ = [
    "Coupling",
    "DiscreteEigenvalue",
    "FieldProfile",
    "FiniteDensity",
    "KGrid",
    "NlsQuenchError",
    "QuenchReport",
    "ScatteringData",
    "Schwartz",
    "classify_regime",
    "make_kgrid",
    "make_profile",
]

__version__ = "0.1.0"
