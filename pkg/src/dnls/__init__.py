"""Pseudospectral toolkit for the energy-critical dipolar Schrödinger equation.

Periodic-box spectral grids, the anisotropic dipole kernel, conserved
functionals and their scaling algebra, Weinstein-quotient ground states,
the mass/energy threshold curve, symplectic time evolution, and virial
identities, with a CLI harness tying them into reproducible artifact runs.
"""

from .grid import Field3D, GridSpec, make_grid, field_from_values
from .kernel import DipoleParams, Regime, classify_regime
from .functionals import PLUS_INFINITY, FunctionalReport, report, weinstein

__all__ = [
    "Field3D",
    "GridSpec",
    "make_grid",
    "field_from_values",
    "DipoleParams",
    "Regime",
    "classify_regime",
    "PLUS_INFINITY",
    "FunctionalReport",
    "report",
    "weinstein",
]

__version__ = "0.1.0"
