"""Equilibrium states for a projected partially hyperbolic horseshoe.

Computes and verifies spectral data of the weighted preimage-sum operator on
a 3-symbol subshift model: eigenvalue and pressure, eigenfunction and
conformal measure, the equilibrium state mu = h nu, hyperbolic-time
combinatorics, Gibbs ratios, and the lift to the 3D horseshoe.
"""

__version__ = "0.1.0"

from .equilibrium import EquilibriumState, build_mu
from .hyperbolic import HyperbolicConstants, derive_constants
from .maps import Parameters, PlanePoint, SpacePoint
from .transfer import Potential, SpectralResult, spectral_solve

__all__ = [
    "__version__",
    "EquilibriumState",
    "HyperbolicConstants",
    "Parameters",
    "PlanePoint",
    "Potential",
    "SpacePoint",
    "SpectralResult",
    "build_mu",
    "derive_constants",
    "spectral_solve",
]
