"""Exact feasibility checks and numerical experiments for cubical singular
Brascamp-Lieb forms."""

from ._backend import BACKEND
from .cube import CubeIndex, CubicalData, FunctionAssignment, corners
from .feasibility import FeasibilityReport, check_conditions
from .gaussian import GaussianMixture, gaussian_integral_exact, lp_norm
from .linalg import RationalMatrix

__version__ = "0.1.0"

__all__ = ["BACKEND", "CubeIndex", "CubicalData", "FunctionAssignment", "corners",
           "FeasibilityReport", "check_conditions", "GaussianMixture", "gaussian_integral_exact",
           "lp_norm", "RationalMatrix", "__version__"]
