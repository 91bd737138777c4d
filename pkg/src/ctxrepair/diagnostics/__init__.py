"""Checker findings: acquisition, taxonomy classification, solution filtering."""

from .builtin import builtin_check
from .external import ANALYZER_ENV_VAR, CheckerConfig, run_external_checker
from .models import (
    CATEGORY_ORDER,
    CODE_TAXONOMY,
    CheckReport,
    Diagnostic,
    ErrorCategory,
    classify,
    extract_symbol,
    filter_to_solution,
    func_diagnostic,
    is_repairable,
    order_dominant_first,
)

__all__ = [
    "ANALYZER_ENV_VAR",
    "CATEGORY_ORDER",
    "CODE_TAXONOMY",
    "CheckReport",
    "CheckerConfig",
    "Diagnostic",
    "ErrorCategory",
    "builtin_check",
    "classify",
    "extract_symbol",
    "filter_to_solution",
    "func_diagnostic",
    "is_repairable",
    "order_dominant_first",
    "run_external_checker",
]
