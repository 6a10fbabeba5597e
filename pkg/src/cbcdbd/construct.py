"""Component-by-component, digit-by-digit generating vector search.

Component 1 is fixed to 1.  Every further component is built digit by
digit: starting from partial value 1, level ``v`` decides whether to add
``2**(v - 1)`` by comparing the digit quality of both candidates and
keeping the smaller one.  Ties keep the zero digit, where "tie" spans a
small relative band around exact equality (see ``prefer_high_digit``) so
that every evaluation route resolves mathematically equal candidates the
same way.

The search is extensible in dimension: the first ``r`` components of an
``s``-dimensional run equal the ``r``-dimensional run exactly, because
component ``r`` never looks at later components.

Three routes produce identical vectors and differ only in cost:

* ``naive`` evaluates the defining double sum (any weight scheme),
* ``fast-pod`` uses order-wise partial sums (POD or product weights),
* ``fast-product`` uses a single accumulator (product weights only).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

from .errors import EnumerationBudgetError
from .lattice import (
    MAX_N_EXPONENT,
    Diagnostics,
    GeneratingVector,
    log_sine_sum,
)
from .quality import (
    PodStateTable,
    ProductStateTable,
    SinLogTable,
    digit_quality_naive,
)
from .weights import GENERAL_ENUM_CAP, PodWeights, ProductWeights, WeightScheme

PATHS = ("auto", "naive", "fast-pod", "fast-product")

QUALITY_TIE_REL = 1e-12


def prefer_high_digit(h_low: float, h_high: float) -> bool:
    """True when the upper digit candidate wins the quality comparison.

    The zero digit wins ties, and "tie" includes a relative band around
    exact equality.  Mathematically equal candidate qualities occur
    structurally: while searching the second component, the scores only
    interact with the constant first component, whose symmetries can make
    both digit subtrees score identically.  The evaluation routes
    accumulate their sums in different orders and may round such an equal
    pair one ulp apart in opposite directions, so a strict comparison
    would let rounding luck pick different digits on different routes.
    The band keeps every route's decision identical; genuinely distinct
    candidates sit many orders of magnitude outside it.
    """
    return h_low - h_high > QUALITY_TIE_REL * max(abs(h_low), abs(h_high))


@dataclass(frozen=True)
class ConstructionConfig:
    """Parameters of one construction run.

    ``path`` selects the evaluation route; ``auto`` picks the fastest
    route valid for the scheme (product -> fast-product, POD -> fast-pod,
    anything else -> naive).  ``tie_break`` documents the only supported
    policy: a quality tie keeps the zero digit.
    """

    n: int
    s: int
    scheme: WeightScheme
    path: str = "auto"
    tie_break: str = "zero"

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or not 1 <= self.n <= MAX_N_EXPONENT:
            raise ValueError(
                f"n must be an integer in 1..{MAX_N_EXPONENT}, got {self.n!r}"
            )
        if not isinstance(self.s, int) or self.s < 1:
            raise ValueError(f"s must be a positive integer, got {self.s!r}")
        if self.s > self.scheme.s_max:
            raise ValueError(
                f"s = {self.s} exceeds the scheme dimension "
                f"{self.scheme.s_max}"
            )
        if self.path not in PATHS:
            raise ValueError(f"path must be one of {PATHS}, got {self.path!r}")
        if self.tie_break != "zero":
            raise ValueError(
                f"the only supported tie break is 'zero', got {self.tie_break!r}"
            )
        if self.path == "fast-product" and not isinstance(
            self.scheme, ProductWeights
        ):
            raise ValueError("path 'fast-product' requires product weights")
        if self.path == "fast-pod" and not isinstance(
            self.scheme, (PodWeights, ProductWeights)
        ):
            raise ValueError("path 'fast-pod' requires POD or product weights")


def resolve_path(config: ConstructionConfig) -> str:
    """Route actually taken for ``config`` (resolves ``auto``)."""
    if config.path != "auto":
        return config.path
    if isinstance(config.scheme, ProductWeights):
        return "fast-product"
    if isinstance(config.scheme, PodWeights):
        return "fast-pod"
    return "naive"


def as_pod(scheme: WeightScheme) -> PodWeights:
    """View product weights as POD weights with unit order factors."""
    if isinstance(scheme, PodWeights):
        return scheme
    if isinstance(scheme, ProductWeights):
        return PodWeights((1.0,) * (scheme.s_max + 1), scheme.gammas)
    raise ValueError(
        f"cannot view {type(scheme).__name__} as POD weights"
    )


def _attach_diagnostics(
    scheme: WeightScheme, gv: GeneratingVector, started: float
) -> Diagnostics:
    diag = Diagnostics()
    diag.timing["construct_seconds"] = time.perf_counter() - started
    t0 = time.perf_counter()
    try:
        diag.log_sine_value = log_sine_sum(scheme, gv)
    except EnumerationBudgetError:
        diag.log_sine_value = None
    diag.timing["log_sine_seconds"] = time.perf_counter() - t0
    return diag


def _run_digit_loop(
    n: int,
    s: int,
    quality: Callable[[int, int, int], float],
    update: Callable[[int, int], None],
    finish: Callable[[], None],
) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """Drive the digit decisions; returns components and digit history.

    ``quality(r, v, x)`` scores candidate ``x`` at level ``v`` for
    component ``r``; ``update(v, z)`` folds the chosen partial value into
    level ``v``; ``finish()`` closes the current component.
    """
    history: list[tuple[int, ...]] = [(1,) * n]
    z: list[int] = [1]
    for r in range(2, s + 1):
        partial = 1
        row = [1]
        for v in range(2, n + 1):
            low = partial
            high = partial + 2 ** (v - 1)
            if prefer_high_digit(quality(r, v, low), quality(r, v, high)):
                partial = high
            row.append(partial)
            update(v, partial)
        finish()
        z.append(partial)
        history.append(tuple(row))
    return tuple(z), tuple(history)


def cbc_dbd(config: ConstructionConfig) -> tuple[GeneratingVector, Diagnostics]:
    """Generic route: digit quality from the defining double sum."""
    if config.s - 1 > GENERAL_ENUM_CAP:
        # the final component alone would enumerate 2^(s-1) subsets; refuse
        # up front instead of grinding through the earlier components first
        raise EnumerationBudgetError(
            f"naive search in dimension {config.s} enumerates subsets of "
            f"{config.s - 1} coordinates, beyond cap {GENERAL_ENUM_CAP}"
        )
    started = time.perf_counter()
    table = SinLogTable(config.n)
    prev_z: list[int] = [1]
    history: list[tuple[int, ...]] = [(1,) * config.n]
    for _r in range(2, config.s + 1):
        fixed = tuple(prev_z)
        partial = 1
        row = [1]
        for v in range(2, config.n + 1):
            low = partial
            high = partial + 2 ** (v - 1)
            h_high = digit_quality_naive(config.scheme, table, fixed, v, high)
            h_low = digit_quality_naive(config.scheme, table, fixed, v, low)
            if prefer_high_digit(h_low, h_high):
                partial = high
            row.append(partial)
        prev_z.append(partial)
        history.append(tuple(row))
    gv = GeneratingVector(config.n, tuple(prev_z), tuple(history))
    return gv, _attach_diagnostics(config.scheme, gv, started)


def cbc_dbd_fast_pod(
    config: ConstructionConfig,
) -> tuple[GeneratingVector, Diagnostics]:
    """Fast route for POD (or product-as-POD) weights."""
    started = time.perf_counter()
    pod = as_pod(config.scheme)
    table = SinLogTable(config.n)
    state = PodStateTable(pod, config.n, config.s, table)
    z, history = _run_digit_loop(
        config.n,
        config.s,
        lambda r, v, x: state.quality(v, x),
        state.update,
        state.finish_component,
    )
    gv = GeneratingVector(config.n, z, history)
    diag = _attach_diagnostics(config.scheme, gv, started)
    diag.bound_values["state_memory_doubles"] = float(state.memory_doubles)
    return gv, diag


def cbc_dbd_fast_product(
    config: ConstructionConfig,
) -> tuple[GeneratingVector, Diagnostics]:
    """Fast route for product weights."""
    if not isinstance(config.scheme, ProductWeights):
        raise ValueError("fast-product construction requires product weights")
    started = time.perf_counter()
    table = SinLogTable(config.n)
    state = ProductStateTable(config.scheme, config.n, config.s, table)
    z, history = _run_digit_loop(
        config.n,
        config.s,
        lambda r, v, x: state.quality(v, x),
        state.update,
        state.finish_component,
    )
    gv = GeneratingVector(config.n, z, history)
    diag = _attach_diagnostics(config.scheme, gv, started)
    diag.bound_values["state_memory_doubles"] = float(state.memory_doubles)
    return gv, diag


def construct(
    config: ConstructionConfig,
) -> tuple[GeneratingVector, Diagnostics]:
    """Run the construction on the route selected by ``config.path``."""
    route = resolve_path(config)
    if route == "fast-product":
        return cbc_dbd_fast_product(config)
    if route == "fast-pod":
        return cbc_dbd_fast_pod(config)
    return cbc_dbd(config)
