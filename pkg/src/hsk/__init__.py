"""Discrete Tracy-Widom kernels factored as K = ±Γ² with Γ a Hankel matrix."""

from .bessel import BesselTable, bessel_row, bessel_series_oracle
from .hankel import HankelSymbol, hankel_matrix, spectral_report, trace_formula
from .twkernel import (
    AffineRecurrence,
    CoefficientSequence,
    GeneralRecurrence,
    check_affine_conditions,
    check_general_conditions,
    extract_symbol,
    kernel_matrix,
    verify_factorization,
)

__version__ = "0.1.0"
