"""Convex relaxation regression for black-box global optimization.

Fit a convex quadratic under-estimator to random evaluations of ``f`` by
mean-constrained L1 regression, minimize it over the ball of radius 2, and
search the mean level that makes the surrogate's minimizer best.
"""

__version__ = "0.1.0"

from .baselines import BaselineResult, nelder_mead, random_search, simulated_annealing  # noqa: E402
from .driver import CorrConfig, CorrResult, corr_optimize, opt_procedure, polish, search_mu  # noqa: E402
from .envelope import EnvelopeFitter, FitProblem, FitResult, fit_envelope, write_lp  # noqa: E402
from .sampler import SampleSet, draw_ball_uniform, draw_sample_sets  # noqa: E402
from .surrogate import QuadSurrogate, features, h_eval, minimize_on_ball  # noqa: E402
from .testbed import FUNCTION_NAMES, TestFunction, evaluate, global_min, make_function  # noqa: E402

__all__ = [
    "BaselineResult",
    "CorrConfig",
    "CorrResult",
    "EnvelopeFitter",
    "FUNCTION_NAMES",
    "FitProblem",
    "FitResult",
    "QuadSurrogate",
    "SampleSet",
    "TestFunction",
    "corr_optimize",
    "draw_ball_uniform",
    "draw_sample_sets",
    "evaluate",
    "features",
    "fit_envelope",
    "global_min",
    "h_eval",
    "make_function",
    "minimize_on_ball",
    "nelder_mead",
    "opt_procedure",
    "polish",
    "random_search",
    "search_mu",
    "simulated_annealing",
    "write_lp",
]
