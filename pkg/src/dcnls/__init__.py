"""Numerical laboratory for the nonlinear Schrodinger equation with
combined mass-critical and energy-critical power nonlinearities.

Submodules:

    grids          radial and periodic-box discretizations
    functionals    conserved quantities, virial functionals, scalings
    ground_states  shooting solvers, reference constants, threshold curves
    dynamics       time stepping, conservation checks, dichotomy verdicts
    profiles       bubble extraction and decoupling diagnostics
    mei            mass-energy indicator and its admissible regions
    fieldio        binary and delimited field serialization
    cli            config-driven experiment runner
    plots          optional figure rendering (imported on demand)
"""

from .functionals import DD, DF, FD, FF, Regime, evaluate
from .grids import BoxField, BoxGrid, RadialField, RadialGrid

__all__ = [
    "BoxField",
    "BoxGrid",
    "RadialField",
    "RadialGrid",
    "Regime",
    "FF",
    "FD",
    "DF",
    "DD",
    "evaluate",
]

__version__ = "0.1.0"
