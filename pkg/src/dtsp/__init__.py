"""Discrete two-sided power distribution DTSP(a, m, b, n)."""

from .core import (
    DtspParams,
    MomentSummary,
    cdf,
    generalized_harmonic,
    hazard,
    log_pmf,
    mean_closed_form,
    median,
    mode_set,
    moments,
    moments_by_summation,
    pmf,
    pmf_ratio,
    pmf_table,
    quantile,
    reflect,
    second_moment_closed_form,
    survival,
    validate,
)
from .estimation import (
    EstimationResult,
    Method,
    Status,
    endpoints_heuristic,
    fit_mle,
    fit_mme,
    log_likelihood,
    score,
)
from .kernels import BACKEND
from .sampling import RngState, Sample, sample_many, sample_one
from .simulation import StudyConfig, StudyReport, run_study
from .tsp import TspParams, tsp_cdf, tsp_mean, tsp_pdf, tsp_quantile, tsp_survival, tsp_variance

__version__ = "0.1.0"
