"""Numerical certification of stable self-similar blowup for equivariant Yang-Mills heat flow."""

from __future__ import annotations

from .acceptance import run_all
from .evolve import (SolverConfig, fit_decay_rate, ou_oracle, project_unstable,
                     run_physical, run_similarity, scaling_check, shoot_T)
from .ggmt import (compute_B, ggmt_constant, ggmt_constant_exact, mu,
                   positivity_threshold, rho_bar, scan_p, theorem_verdict)
from .model import (Dimension, GridFunction, RadialGrid, eval_profile,
                    make_dimension, make_grid, nonlinearity, norms,
                    sample_profile, sigma_l2, stationary_residual, sup_norm)
from .spectral import (eigen_lowest, eigenfunction_residual, richardson_eigen,
                       spectral_gap, susy_isospectrality)

__version__ = "0.1.0"

__all__ = [
    "Dimension", "GridFunction", "RadialGrid", "eval_profile",
    "make_dimension", "make_grid", "nonlinearity", "norms",
    "sample_profile", "sigma_l2", "stationary_residual", "sup_norm",
    "compute_B", "ggmt_constant", "ggmt_constant_exact", "mu",
    "positivity_threshold", "rho_bar", "scan_p", "theorem_verdict",
    "eigen_lowest", "eigenfunction_residual", "richardson_eigen",
    "spectral_gap", "susy_isospectrality",
    "SolverConfig", "fit_decay_rate", "ou_oracle", "project_unstable",
    "run_physical", "run_similarity", "scaling_check", "shoot_T",
    "run_all",
    "__version__",
]
