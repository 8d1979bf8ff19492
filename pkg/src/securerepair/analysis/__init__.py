"""Exact verification of repairability and security, and bandwidth bounds."""
from .bounds import (
    BoundsReport,
    bounds_csv,
    bounds_report,
    lower_bound_bandwidth,
    upper_bound_bandwidth,
)
from .enumeration import (
    DEFAULT_BUDGET,
    CellResult,
    VerificationResult,
    check_repairability,
    enumerate_protocol,
    enumerate_scheme,
    verify_protocol,
)
from .tables import (
    DistributionTable,
    check_independence,
    entropy,
    is_function_of,
    is_uniform,
)

__all__ = [
    "DEFAULT_BUDGET",
    "BoundsReport",
    "CellResult",
    "DistributionTable",
    "VerificationResult",
    "bounds_csv",
    "bounds_report",
    "check_independence",
    "check_repairability",
    "entropy",
    "enumerate_protocol",
    "enumerate_scheme",
    "is_function_of",
    "is_uniform",
    "lower_bound_bandwidth",
    "upper_bound_bandwidth",
    "verify_protocol",
]
