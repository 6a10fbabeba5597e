"""Proved error and quality bounds, evaluated as checkable reports.

Every check returns a :class:`BoundReport` comparing an exactly computed
left-hand side against the corresponding guaranteed right-hand side.  A
report is satisfied when ``lhs <= rhs + 1e-9 * max(1, |rhs|)``; the small
relative slack absorbs floating-point accumulation, never a real violation.
Checks never mutate their inputs, and the context carries everything needed
to recompute both sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from scipy.special import zeta

from .errors import EnumerationBudgetError
from .lattice import (
    DUAL_SUM_BUDGET,
    GeneratingVector,
    dual_error_even_alpha,
    log_sine_sum,
    truncated_dual_sum,
)
from .weights import (
    GENERAL_ENUM_CAP,
    PodWeights,
    ProductWeights,
    WeightScheme,
    iter_subsets,
    scheme_to_dict,
    shifted,
)

#: Relative slack granted to every right-hand side.
BOUND_SLACK_REL = 1e-9

_LOG4 = math.log(4.0)


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one inequality check.

    ``satisfied`` holds exactly when ``lhs <= rhs + slack`` with the
    package-wide relative slack.  ``context`` records the instance
    (dimensions, scheme, vector, warnings) for reproduction.
    """

    name: str
    lhs: float
    rhs: float
    satisfied: bool
    context: dict = field(default_factory=dict)

    @staticmethod
    def build(name: str, lhs: float, rhs: float, context: dict) -> "BoundReport":
        ok = lhs <= rhs + BOUND_SLACK_REL * max(1.0, abs(rhs))
        return BoundReport(name, lhs, rhs, ok, context)


def _context(
    scheme: WeightScheme,
    gv: GeneratingVector,
    warnings: Optional[list[str]] = None,
    **extra,
) -> dict:
    try:
        scheme_payload: object = scheme_to_dict(scheme)
    except Exception:
        scheme_payload = repr(scheme)
    out = {
        "n": gv.n,
        "s": gv.s,
        "z": list(gv.z),
        "scheme": scheme_payload,
    }
    if warnings:
        out["warnings"] = list(warnings)
    out.update(extra)
    return out


def elementary_symmetric(values: Sequence[float]) -> list[float]:
    """All elementary symmetric polynomials ``e_0 .. e_len`` of ``values``."""
    e = [1.0] + [0.0] * len(values)
    for count, x in enumerate(values, start=1):
        for ell in range(count, 0, -1):
            e[ell] += x * e[ell - 1]
    return e


def weighted_order_sum(
    scheme: WeightScheme,
    s: int,
    coeff: Sequence[float],
    cap: int = GENERAL_ENUM_CAP,
) -> float:
    """Sum of ``weight(u) * coeff[|u|]`` over non-empty ``u`` within {1..s}.

    Product and POD schemes reduce to elementary symmetric polynomials of
    their gammas; any other scheme enumerates subsets (capped).
    """
    if len(coeff) < s + 1:
        raise ValueError(f"need coefficients for orders 0..{s}")
    if isinstance(scheme, ProductWeights):
        e = elementary_symmetric(scheme.gammas[:s])
        return sum(e[ell] * coeff[ell] for ell in range(1, s + 1))
    if isinstance(scheme, PodWeights):
        e = elementary_symmetric(scheme.gammas[:s])
        return sum(
            scheme.Gammas[ell] * e[ell] * coeff[ell] for ell in range(1, s + 1)
        )
    if s > cap:
        raise EnumerationBudgetError(
            f"subset enumeration over {s} coordinates exceeds cap {cap}"
        )
    return sum(
        scheme.weight(u) * coeff[len(u)]
        for u in iter_subsets(range(1, s + 1))
    )


def truncation_tail_factor(
    alpha: float, scheme: WeightScheme, s: int, cap: int = GENERAL_ENUM_CAP
) -> float:
    """Resolution-free factor bounding the frequency-box truncation gap.

    The full dual error exceeds the truncated dual sum by at most this
    factor divided by ``N**alpha``; the factor is
    ``sum_u weight(u) * (4 * zeta(alpha))**|u|``.  Needs ``alpha > 1``.
    """
    if not alpha > 1:
        raise ValueError(f"the tail factor needs smoothness > 1, got {alpha}")
    base = 4.0 * float(zeta(alpha, 1))
    coeff = [base**ell for ell in range(s + 1)]
    return weighted_order_sum(scheme, s, coeff, cap=cap)


def t1_bound_rhs(
    scheme: WeightScheme,
    gv: GeneratingVector,
    log_sine_value: float,
    cap: int = GENERAL_ENUM_CAP,
) -> float:
    """Guaranteed upper bound on the smoothness-1 truncated dual sum.

    Combines three order-weighted sums with the log-sine quality value of
    the vector (passed in so callers can reuse an existing evaluation).
    """
    N, s = gv.N, gv.s
    log_n = math.log(N)
    a = _LOG4 + 2.0 * (1.0 + log_n)
    b = 1.0 + 2.0 * log_n
    sum_a = weighted_order_sum(
        scheme, s, [a**ell for ell in range(s + 1)], cap=cap
    )
    sum_log4 = weighted_order_sum(
        scheme, s, [_LOG4**ell for ell in range(s + 1)], cap=cap
    )
    sum_ord = weighted_order_sum(
        scheme, s, [ell * b**ell for ell in range(s + 1)], cap=cap
    )
    return (
        sum_a / N
        - sum_log4
        + 2.0 * (1.0 + log_n) * sum_ord / N
        + log_sine_value / N
    )


def check_t1_bound(
    scheme: WeightScheme,
    gv: GeneratingVector,
    budget: int = DUAL_SUM_BUDGET,
    cap: int = GENERAL_ENUM_CAP,
) -> BoundReport:
    """Truncated dual sum at smoothness 1 against its quality-based bound."""
    lhs = truncated_dual_sum(1.0, scheme, gv, budget=budget)
    h_value = log_sine_sum(scheme, gv, cap=cap)
    rhs = t1_bound_rhs(scheme, gv, h_value, cap=cap)
    return BoundReport.build(
        "t1-from-quality", lhs, rhs, _context(scheme, gv, log_sine=h_value)
    )


def check_quality_recursion(
    scheme: WeightScheme,
    gv: GeneratingVector,
    r: int,
    cap: int = GENERAL_ENUM_CAP,
) -> BoundReport:
    """Component recursion of the log-sine quality sum at dimension ``r``.

    The quality sum of the first ``r`` components is bounded by the sum at
    ``r - 1`` plus ``log 4`` times (the singleton weight of ``r`` times N,
    plus the ``r - 1``-dimensional sum under weights re-anchored at ``r``).
    Guaranteed for digit-by-digit constructed vectors; a vector without
    digit history is checked anyway but annotated.
    """
    if not 2 <= r <= gv.s:
        raise ValueError(f"recursion index r must be in 2..{gv.s}, got {r}")
    warnings = []
    if gv.digit_history is None:
        warnings.append(
            "vector carries no digit history; the recursion is only "
            "guaranteed for digit-by-digit constructed vectors"
        )
    lhs = log_sine_sum(scheme, gv.prefix(r), cap=cap)
    prev = gv.prefix(r - 1)
    anchored = shifted(scheme, (r,))
    rhs = log_sine_sum(scheme, prev, cap=cap) + _LOG4 * (
        scheme.weight((r,)) * gv.N + log_sine_sum(anchored, prev, cap=cap)
    )
    return BoundReport.build(
        "quality-recursion", lhs, rhs, _context(scheme, gv, warnings, r=r)
    )


def check_quality_sum_bound(
    scheme: WeightScheme, gv: GeneratingVector, cap: int = GENERAL_ENUM_CAP
) -> BoundReport:
    """Log-sine quality sum against its closed weighted bound.

    For constructed vectors the quality sum stays below ``N`` times the
    order-weighted sum with coefficients ``(log 4)**|u|``; for product
    weights that equals ``N * (prod_j (1 + gamma_j log 4) - 1)``.
    """
    lhs = log_sine_sum(scheme, gv, cap=cap)
    factor = weighted_order_sum(
        scheme, gv.s, [_LOG4**ell for ell in range(gv.s + 1)], cap=cap
    )
    warnings = []
    if gv.digit_history is None:
        warnings.append(
            "vector carries no digit history; the bound is only "
            "guaranteed for digit-by-digit constructed vectors"
        )
    return BoundReport.build(
        "quality-sum-bound", lhs, gv.N * factor, _context(scheme, gv, warnings)
    )


def check_truncation_gap(
    scheme: WeightScheme,
    gv: GeneratingVector,
    alpha: int = 2,
    budget: int = DUAL_SUM_BUDGET,
    cap: int = GENERAL_ENUM_CAP,
) -> BoundReport:
    """Gap between the full dual error and the truncated dual sum.

    The difference must stay below the truncation tail factor divided by
    ``N**alpha``.  Uses the closed-form dual error, so ``alpha`` must be
    even (2, 4 or 6).
    """
    full = dual_error_even_alpha(alpha, scheme, gv, cap=cap)
    truncated = truncated_dual_sum(float(alpha), scheme, gv, budget=budget)
    factor = truncation_tail_factor(float(alpha), scheme, gv.s, cap=cap)
    return BoundReport.build(
        "truncation-gap",
        full - truncated,
        factor / float(gv.N) ** alpha,
        _context(scheme, gv, alpha=alpha, dual_error=full, truncated=truncated),
    )


@dataclass(frozen=True)
class SummabilityReport:
    """Growth-ratio diagnostic: per-coordinate terms and their total."""

    terms: tuple[float, ...]
    total: float


def summability_diagnostic(
    scheme: WeightScheme, s: int, cap: int = GENERAL_ENUM_CAP
) -> SummabilityReport:
    """Sum of worst-case adjoining ratios over the first ``s`` coordinates.

    A bounded total as ``s`` grows signals dimension-independent error
    behavior; the per-term sequence shows which coordinates dominate.
    """
    if not 1 <= s <= scheme.s_max:
        raise ValueError(f"s must be in 1..{scheme.s_max}, got {s}")
    terms = tuple(scheme.max_growth_ratio(j, cap=cap) for j in range(1, s + 1))
    return SummabilityReport(terms, math.fsum(terms))
