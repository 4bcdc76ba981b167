"""Exact and sampled distribution of the maximal self-overlap of random words."""

from __future__ import annotations

__version__ = "0.1.0"

from .alphabet import Theta, ThetaError, from_probs, geometric, make_theta, uniform
from .border_core import borders, first_return, max_overlap, prefix_function
from .exact_dist import BudgetExceeded, DistTable, enumerate_distribution, level_mass, union_prob
from .limit_series import TruncatedSeries, limit_cdf_tail, limit_pmf
from .zero_words import limit_zero, p_zero, unbordered_count

__all__ = [
    "BudgetExceeded",
    "DistTable",
    "Theta",
    "ThetaError",
    "TruncatedSeries",
    "__version__",
    "borders",
    "enumerate_distribution",
    "first_return",
    "from_probs",
    "geometric",
    "level_mass",
    "limit_cdf_tail",
    "limit_pmf",
    "limit_zero",
    "make_theta",
    "max_overlap",
    "p_zero",
    "prefix_function",
    "unbordered_count",
    "union_prob",
    "uniform",
]
