"""Exact and Monte Carlo evaluation of the forms, symmetries and experiments."""

from ..gaussian import GaussianMixture, gaussian_integral_exact, lp_norm
from .experiments import (BlowupResult, SweepResult, am_gm_bound, blowup_cubical,
                          blowup_experiment, norm_product, sweep_truncation)
from .forms import FormResult, RouteError, eval_delta_form, eval_form, eval_subspace_form
from .montecarlo import mc_integrate
from .symmetry import SymmetryResult, apply_symmetry, permutation_matrix

__all__ = ["GaussianMixture", "gaussian_integral_exact", "lp_norm", "BlowupResult", "SweepResult",
           "am_gm_bound", "blowup_cubical", "blowup_experiment", "norm_product", "sweep_truncation",
           "FormResult", "RouteError", "eval_delta_form", "eval_form", "eval_subspace_form",
           "mc_integrate", "SymmetryResult", "apply_symmetry", "permutation_matrix"]
