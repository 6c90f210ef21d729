"""Exact and empirical verification suites."""

from ..results import CheckResult, SuiteReport
from .generators import make_rng, predictable_coefficients, random_function, random_functions
from .runner import UnknownSuiteError, run_suite, suite_names
from .suites import CATALOG

__all__ = [
    "CATALOG", "CheckResult", "SuiteReport", "UnknownSuiteError", "make_rng",
    "predictable_coefficients", "random_function", "random_functions", "run_suite", "suite_names",
]
