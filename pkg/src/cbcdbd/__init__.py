"""Digit-by-digit construction of rank-1 lattice rules for weighted
quasi-Monte Carlo integration, with exact desk-scale verification of the
associated error functionals and bounds."""

from .bounds import (
    BoundReport,
    SummabilityReport,
    check_quality_recursion,
    check_quality_sum_bound,
    check_t1_bound,
    check_truncation_gap,
    summability_diagnostic,
    t1_bound_rhs,
    truncation_tail_factor,
    weighted_order_sum,
)
from .construct import (
    ConstructionConfig,
    cbc_dbd,
    cbc_dbd_fast_pod,
    cbc_dbd_fast_product,
    construct,
    prefer_high_digit,
)
from .errors import EnumerationBudgetError, SmoothnessError, WeightSpecError
from .lattice import (
    DUAL_SUM_BUDGET,
    MAX_N_EXPONENT,
    Diagnostics,
    GeneratingVector,
    bernoulli_kernel,
    dual_error_even_alpha,
    fourier_decay,
    lattice_points,
    log_sine_sum,
    qmc_integrate,
    truncated_dual_sum,
)
from .quality import (
    PodStateTable,
    ProductStateTable,
    SinLogTable,
    digit_quality_naive,
)
from .weights import (
    GeneralWeights,
    PodWeights,
    ProductWeights,
    ShiftedWeights,
    WeightScheme,
    load_weights,
    save_weights,
    scheme_from_dict,
    scheme_to_dict,
    shifted,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "ConstructionConfig",
    "DUAL_SUM_BUDGET",
    "Diagnostics",
    "EnumerationBudgetError",
    "GeneralWeights",
    "GeneratingVector",
    "MAX_N_EXPONENT",
    "PodStateTable",
    "PodWeights",
    "ProductStateTable",
    "ProductWeights",
    "ShiftedWeights",
    "SinLogTable",
    "SmoothnessError",
    "SummabilityReport",
    "WeightScheme",
    "WeightSpecError",
    "bernoulli_kernel",
    "cbc_dbd",
    "cbc_dbd_fast_pod",
    "cbc_dbd_fast_product",
    "check_quality_recursion",
    "check_quality_sum_bound",
    "check_t1_bound",
    "check_truncation_gap",
    "construct",
    "digit_quality_naive",
    "dual_error_even_alpha",
    "fourier_decay",
    "lattice_points",
    "load_weights",
    "log_sine_sum",
    "prefer_high_digit",
    "qmc_integrate",
    "save_weights",
    "scheme_from_dict",
    "scheme_to_dict",
    "shifted",
    "summability_diagnostic",
    "t1_bound_rhs",
    "truncated_dual_sum",
    "truncation_tail_factor",
    "weighted_order_sum",
]
