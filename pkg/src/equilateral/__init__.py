"""Equilateral point sets in normed spaces close to l_inf^n and l_p^n."""

from .construct import (
    LpParams,
    PointConfig,
    derive_lp_params,
    layout_linf,
    layout_lp,
    phi_linf,
    phi_lp,
    solve_equilateral_linf,
    solve_equilateral_lp,
)
from .errors import (
    BoxViolationError,
    DimensionError,
    EquilateralError,
    InvalidNormError,
    NormalizationError,
    PreconditionError,
    UnsupportedFamilyError,
)
from .norms import (
    Composed,
    Polytope,
    SandwichCertificate,
    WeightedLinf,
    WeightedLp,
    certificate_exact,
    certificate_sampled,
    evaluate,
)
from .radius import RadiusResult, asymptotic_estimate, maximize_radius, objective
from .solver import EpsilonVector, SolveReport, brute_force_fixed_point, solve_fixed_point
from .verify import EquilateralReport, certify_run, check_equilateral, extension_search

__version__ = "0.1.0"
