"""Harris family of discrete distributions: H1(m, k, 1/k) and H0(m, k, 1/k)."""

from .distribution import (
    HarrisParams,
    NBParams,
    SupportPoint,
    Variant,
    cdf,
    cgf,
    characterization_residual,
    conditional_pmf,
    make_params,
    mgf,
    nb_inverse,
    nb_transform,
    pgf,
    pmf,
    pmf_table,
    quantile,
    survival,
)
from .estimation import FitResult, Sample, fit_mle, fit_moments, infer_lattice, mle_score
from .moments import MomentSet, brute_force_moment, moments, recurrence_check
from .sampling import RngStream, sample_gamma_poisson, sample_inverse, sample_nb

__version__ = "0.1.0"

__all__ = [
    "HarrisParams",
    "NBParams",
    "SupportPoint",
    "Variant",
    "cdf",
    "cgf",
    "characterization_residual",
    "conditional_pmf",
    "make_params",
    "mgf",
    "nb_inverse",
    "nb_transform",
    "pgf",
    "pmf",
    "pmf_table",
    "quantile",
    "survival",
    "FitResult",
    "Sample",
    "fit_mle",
    "fit_moments",
    "infer_lattice",
    "mle_score",
    "MomentSet",
    "brute_force_moment",
    "moments",
    "recurrence_check",
    "RngStream",
    "sample_gamma_poisson",
    "sample_inverse",
    "sample_nb",
]
