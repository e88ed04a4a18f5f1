"""Numerical laboratory for Schroedinger operators on regular rooted trees.

The package computes forward resolvents of H = adjacency + radially
periodic background + weak random disorder, three ways: exactly on
truncated trees, through transfer-matrix cocycles at zero disorder, and
distributionally through resampling populations.  On top of those sit
width statistics, Lyapunov estimates, certified inequality checks, and
reproducible experiment drivers.
"""

from ._kernels import BACKEND
from .cocycle import (BandSet, FixedPoints, MobiusMap, PeriodMap, ac_bands,
                      compose_period, discriminant_grid, fixed_points,
                      halfline_bands_oracle, period_modulus_product,
                      phase_fixed_points, step_map)
from .errors import (AlphaRangeError, ArgumentError, BandEdgeError,
                     BandViolationError, BudgetError, ConvergenceWarning,
                     DegenerateMapError, GridTooCoarseWarning,
                     IllConditionedError, RangeError, SchemaError,
                     TreegreenError, ZeroGammaError)
from .experiments import (CurveRecord, ExperimentConfig, ExperimentResult,
                          run_cauchy_oracle, run_continuity_experiment,
                          run_dos_report, run_experiment,
                          run_fluctuation_suite, run_radial_contrast,
                          write_curve_csv)
from .model import (Bernoulli, Cauchy, Constant, DisorderSpec,
                    EvaluationPoint, Gaussian, PotentialSpec, TreeParams,
                    Uniform, background_at, potential_at, sample_disorder,
                    shifted_phase)
from .resolvent import (EquilibrationDiagnostics, ExactTreeResult, GammaPool,
                        GammaSample, eta_extrapolate, exact_tree_gamma,
                        free_forward_resolvent, ks_distance,
                        log_moment_bound, offdiag_green,
                        periodic_forward_resolvent, population_equilibrate,
                        population_init, population_step, radial_chain_gamma,
                        validate_pool)
from .stats import (BoundReport, EmpiricalDistribution, LyapunovEstimate,
                    WidthStats, delta_rules_check, fluctuation_bound_check,
                    fractional_moment_budget, jensen_boost_gap,
                    jensen_boost_gap_many, kotani_bound_check,
                    lyapunov_estimate, pool_width, quantile_brackets,
                    tail_budget_check)

__version__ = "0.1.0"

__all__ = [
    "__version__", "BACKEND",
    # model
    "Uniform", "Cauchy", "Gaussian", "Bernoulli", "Constant", "DisorderSpec",
    "TreeParams", "PotentialSpec", "EvaluationPoint", "shifted_phase",
    "background_at", "potential_at", "sample_disorder",
    # resolvent
    "GammaSample", "GammaPool", "ExactTreeResult", "EquilibrationDiagnostics",
    "free_forward_resolvent", "periodic_forward_resolvent",
    "exact_tree_gamma", "radial_chain_gamma", "population_init",
    "population_step", "population_equilibrate", "validate_pool",
    "ks_distance", "offdiag_green", "eta_extrapolate", "log_moment_bound",
    # cocycle
    "MobiusMap", "PeriodMap", "FixedPoints", "BandSet", "step_map",
    "compose_period", "fixed_points", "phase_fixed_points",
    "discriminant_grid", "ac_bands", "halfline_bands_oracle",
    "period_modulus_product",
    # stats
    "EmpiricalDistribution", "WidthStats", "LyapunovEstimate", "BoundReport",
    "quantile_brackets", "pool_width", "delta_rules_check",
    "jensen_boost_gap", "jensen_boost_gap_many", "lyapunov_estimate",
    "fluctuation_bound_check", "fractional_moment_budget",
    "tail_budget_check", "kotani_bound_check",
    # experiments
    "ExperimentConfig", "CurveRecord", "ExperimentResult", "run_dos_report",
    "run_continuity_experiment", "run_cauchy_oracle", "run_radial_contrast",
    "run_fluctuation_suite", "run_experiment", "write_curve_csv",
    # errors
    "TreegreenError", "ArgumentError", "RangeError", "SchemaError",
    "BudgetError", "BandEdgeError", "IllConditionedError",
    "DegenerateMapError", "AlphaRangeError", "ZeroGammaError",
    "BandViolationError", "ConvergenceWarning", "GridTooCoarseWarning",
]
