"""Revenue-optimal bundle pricing for a buyer with linear values and a demand cap."""

from .distributions import (ConstantElasticity, ExponentialTruncated, Marginal, Mixture,
                            PiecewiseLinearCDF, ProblemInstance, TruncatedNormal, Uniform,
                            is_dmr, is_regular, mixture)
from .optimizer import OptimizeConfig, grid_search, maximize, project_ordered
from .revenue import assign_sigma, best_bundle, rev, rev_sigma, supergradient

__all__ = [
    "ConstantElasticity", "ExponentialTruncated", "Marginal", "Mixture", "PiecewiseLinearCDF",
    "ProblemInstance", "TruncatedNormal", "Uniform", "is_dmr", "is_regular", "mixture",
    "OptimizeConfig", "grid_search", "maximize", "project_ordered",
    "assign_sigma", "best_bundle", "rev", "rev_sigma", "supergradient",
]
