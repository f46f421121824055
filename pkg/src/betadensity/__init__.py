"""Eigenvalue densities of Laguerre and Jacobi beta-ensembles: exact finite-N
formulas, bulk laws, large-deviation tail asymptotics and Monte Carlo oracles."""

__version__ = "0.1.0"

from .ensemble import Flavor, JacobiEnsemble, LaguerreEnsemble, Region
from .logvalue import LogValue
from .bulkdensity import bulk_law, corrected_density, jacobi_bulk_density, mp_density
from .largedev import asym_density, asym_density_jacobi, asym_density_laguerre
from .exactdensity import (brute_force_density, exact_density, exact_density_jacobi_beta1,
                           exact_density_jacobi_beta2, exact_density_laguerre_beta1,
                           exact_density_laguerre_beta2)
from .softedge import hard_edge_tail, scaling_limit_check, tw_right_tail

__all__ = [
    "Flavor", "JacobiEnsemble", "LaguerreEnsemble", "Region", "LogValue",
    "bulk_law", "corrected_density", "jacobi_bulk_density", "mp_density",
    "asym_density", "asym_density_jacobi", "asym_density_laguerre",
    "brute_force_density", "exact_density", "exact_density_jacobi_beta1",
    "exact_density_jacobi_beta2", "exact_density_laguerre_beta1", "exact_density_laguerre_beta2",
    "hard_edge_tail", "scaling_limit_check", "tw_right_tail",
]
