"""Multipliers, Gaussian identities, stick search and cone partitions."""

from .cone import ConePartition, cone_partition
from .identities import (annular_profile_check, gaussian_domination, gaussian_identity_check,
                         telescoping_closed_form, telescoping_integral)
from .kernels import (Dirac, DerivGaussScale, HeatDifference, KernelSpec, MixtureKernel,
                      SymbolCheck, cz_symbol_check, deriv_gauss_multiplier, export_multiplier_csv,
                      heat_difference_mixture, multiplier, parse_kernel, radial_grid, sigma_multiplier)
from .stick import StickResult, StickSearchError, delta_schedule, stick_search, verify_stick

__all__ = [
    "ConePartition", "cone_partition", "annular_profile_check", "gaussian_domination",
    "gaussian_identity_check", "telescoping_closed_form", "telescoping_integral", "Dirac",
    "DerivGaussScale", "HeatDifference", "KernelSpec", "MixtureKernel", "SymbolCheck",
    "cz_symbol_check", "deriv_gauss_multiplier", "export_multiplier_csv", "heat_difference_mixture",
    "multiplier", "parse_kernel", "radial_grid", "sigma_multiplier", "StickResult",
    "StickSearchError", "delta_schedule", "stick_search", "verify_stick",
]
