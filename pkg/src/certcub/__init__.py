"""Certified two-dimensional cubature with Ostrowski-type error bounds."""

from ._backend import BACKEND
from .bounds import BoundBreakdown, bd_error_bound, error_bound, optimal_params, params_for_mode
from .composite import CompositeReport, CompositeRow, convergence_table, integrate_composite
from .core import (
    BivariateFn,
    CertifiedValue,
    ParamMode,
    ParamSet,
    Provenance,
    QuadConfig,
    Rectangle,
    validate_params,
)
from .errors import *  # noqa: F401,F403
from .expr import parse, to_bivariate
from .kernels import KernelSpec, kernel_eval, kernel_l1
from .oracle import OracleResult, reference_integral, reference_kernel_integral
from .quad1d import GaussRule, gauss_rule, integrate_1d
from .rule import (
    RuleTerms,
    bd_cubature_value,
    corner_term_H,
    cubature_value,
    identity_residual,
    midline_term_G,
    ostrowski_1d_value_and_bound,
)
from .supnorm import SupNormEstimate, estimate_mixed_sup

__version__ = "0.1.0"
