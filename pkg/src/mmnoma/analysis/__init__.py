"""Analytical coverage: interference Laplace transforms, theorems, closed forms."""

from .closed_form import (
    coverage_far_fnrf_closed,
    coverage_far_rnff_closed,
    coverage_near_fnrf_closed,
    coverage_near_rnff_closed,
)
from .laplace import (
    LaplaceEvaluator,
    laplace_full,
    laplace_special1,
    psi_constant,
    theta_kernel,
)
from .theorems import (
    CoverageResult,
    coverage,
    coverage_far_fnrf,
    coverage_far_rnff,
    coverage_near_fnrf,
    coverage_near_rnff,
    far_coverage_value,
    near_coverage_value,
)

__all__ = [
    "CoverageResult",
    "LaplaceEvaluator",
    "coverage",
    "coverage_far_fnrf",
    "coverage_far_fnrf_closed",
    "coverage_far_rnff",
    "coverage_far_rnff_closed",
    "coverage_near_fnrf",
    "coverage_near_fnrf_closed",
    "coverage_near_rnff",
    "coverage_near_rnff_closed",
    "far_coverage_value",
    "laplace_full",
    "laplace_special1",
    "near_coverage_value",
    "psi_constant",
    "theta_kernel",
]
