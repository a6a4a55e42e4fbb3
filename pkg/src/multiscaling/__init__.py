"""Multiscaling measurement toolkit.

Synthetic uni/multi-scaling series (Brownian, t-innovation, multifractal
random walk), surrogate transforms (shuffle, rank-Gaussianization), and
scaling-exponent estimation with the parabolic multiscaling coefficient,
built to study how the lag-aggregation window biases the measurements.
"""

__version__ = "0.1.0"

from .core import (LagWindow, MasterSeed, QGrid, Series, abs_moment,
                   increments, LARGE_WINDOW, SMALL_WINDOW)
from .errors import (DataError, DomainError, EstimationError,
                     MultiscalingError, UsageError)
from .estimators import (CovFit, ParabolaFit, ScalingResult, TailFit,
                         estimate_ghe, fit_log_autocovariance, fit_parabola,
                         fit_tail, parabola_ols)
from .experiments import (BatteryReport, ExperimentPlan, ExperimentReport,
                          run_experiment, surrogate_battery)
from .generators import (MrwParams, TbmParams, TheorySpectrum, gen_bm,
                         gen_mrw, gen_tbm, gaussian_from_covariance,
                         theory_spectrum)
from .surrogates import gaussianize, shuffle

__all__ = [
    "__version__",
    "Series", "LagWindow", "QGrid", "MasterSeed", "SMALL_WINDOW",
    "LARGE_WINDOW", "increments", "abs_moment",
    "MultiscalingError", "DomainError", "DataError", "EstimationError",
    "UsageError",
    "TbmParams", "MrwParams", "TheorySpectrum", "gen_bm", "gen_tbm",
    "gen_mrw", "gaussian_from_covariance", "theory_spectrum",
    "shuffle", "gaussianize",
    "ScalingResult", "ParabolaFit", "CovFit", "TailFit", "estimate_ghe",
    "fit_parabola", "parabola_ols", "fit_log_autocovariance", "fit_tail",
    "ExperimentPlan", "ExperimentReport", "BatteryReport", "run_experiment",
    "surrogate_battery",
]
