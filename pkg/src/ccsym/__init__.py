"""Nonparametric tests of copula central symmetry for multivariate time series."""

__version__ = "0.1.0"

from .exceptions import ConfigError, InputError
from .panel import ReturnPanel, parse_panel, read_panel, split_by_year
from .pseudoobs import (
    PseudoSample,
    antisymmetrization,
    ecdf_copula,
    normalized_ranks,
    reflect,
    survival_by_inclusion_exclusion,
    survival_copula,
    symmetrization,
)
from .symmetry_test import BootstrapConfig, TestResult, cvm_statistic, run_test
from .multiple_testing import YearlyReport, bh_fdr, yearly_procedure

__all__ = [
    "ConfigError",
    "InputError",
    "ReturnPanel",
    "parse_panel",
    "read_panel",
    "split_by_year",
    "PseudoSample",
    "normalized_ranks",
    "ecdf_copula",
    "survival_copula",
    "antisymmetrization",
    "symmetrization",
    "reflect",
    "survival_by_inclusion_exclusion",
    "BootstrapConfig",
    "TestResult",
    "cvm_statistic",
    "run_test",
    "YearlyReport",
    "bh_fdr",
    "yearly_procedure",
]
