"""Randomized verification campaigns and measurement drivers.

A campaign sweeps a grid of resolutions and dimensions, draws random weight
schemes (cycling product, POD and general tables), constructs a vector for
each instance and evaluates one family of bound checks.  Row order is fully
determined by the grid and the master seed, so identical parameters produce
identical reports; instances whose exact enumeration would exceed the
budget are reported as skipped rather than failed.

The number of worker processes is taken from the ``CBCDBD_WORKERS``
environment variable (default: available parallelism).
"""

from __future__ import annotations

import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bounds import (
    BoundReport,
    check_quality_recursion,
    check_quality_sum_bound,
    check_t1_bound,
    check_truncation_gap,
)
from .construct import ConstructionConfig, construct
from .lattice import DUAL_SUM_BUDGET, dual_error_even_alpha
from .weights import (
    GeneralWeights,
    PodWeights,
    ProductWeights,
    WeightScheme,
    iter_subsets,
)

CAMPAIGNS = ("thm2", "induction", "hbound", "prop1")
SCHEME_KINDS = ("product", "pod", "general")
WORKERS_ENV = "CBCDBD_WORKERS"


def resolve_workers(workers: Optional[int] = None) -> int:
    """Worker count: explicit argument, else environment, else CPU count."""
    if workers is None:
        raw = os.environ.get(WORKERS_ENV)
        if raw is not None:
            try:
                workers = int(raw)
            except ValueError as exc:
                raise ValueError(
                    f"{WORKERS_ENV} must be an integer, got {raw!r}"
                ) from exc
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


def draw_scheme(
    kind: str, s: int, rng: np.random.Generator
) -> WeightScheme:
    """Random weight scheme with values log-uniform in [0.01, 1].

    POD order factors are drawn from three regimes: flat, factorial
    growth, and inverse-factorial decay.
    """
    if kind == "product":
        return ProductWeights(tuple(10.0 ** rng.uniform(-2.0, 0.0, s)))
    if kind == "pod":
        gammas = tuple(10.0 ** rng.uniform(-2.0, 0.0, s))
        regime = int(rng.integers(0, 3))
        if regime == 0:
            Gammas = (1.0,) * (s + 1)
        elif regime == 1:
            Gammas = tuple(float(math.factorial(ell)) for ell in range(s + 1))
        else:
            Gammas = tuple(1.0 / math.factorial(ell) for ell in range(s + 1))
        return PodWeights(Gammas, gammas)
    if kind == "general":
        table = {
            u: float(10.0 ** rng.uniform(-2.0, 0.0))
            for u in iter_subsets(range(1, s + 1))
        }
        return GeneralWeights(s, table)
    raise ValueError(f"unknown scheme kind {kind!r}")


@dataclass(frozen=True)
class CampaignRow:
    """One line of a verification report."""

    campaign: str
    theorem: str
    n: int
    s: int
    lhs: Optional[float]
    rhs: Optional[float]
    satisfied: str  # "true", "false" or "skipped"
    seed: int


def _row(campaign: str, report: BoundReport, seed: int) -> CampaignRow:
    return CampaignRow(
        campaign,
        report.name,
        report.context["n"],
        report.context["s"],
        report.lhs,
        report.rhs,
        "true" if report.satisfied else "false",
        seed,
    )


def _skipped(
    campaign: str, theorem: str, n: int, s: int, seed: int
) -> CampaignRow:
    return CampaignRow(campaign, theorem, n, s, None, None, "skipped", seed)


def instance_rows(
    campaign: str,
    n: int,
    s: int,
    draw_index: int,
    master_seed: int,
    budget: int = DUAL_SUM_BUDGET,
) -> list[CampaignRow]:
    """Rows from one randomized instance of one campaign."""
    seq = np.random.SeedSequence((master_seed, n, s, draw_index))
    seed = int(seq.generate_state(1)[0])
    rng = np.random.default_rng(seq)
    kind = SCHEME_KINDS[draw_index % len(SCHEME_KINDS)]
    scheme = draw_scheme(kind, s, rng)
    gv, _ = construct(ConstructionConfig(n, s, scheme))
    N = gv.N

    if campaign == "hbound":
        return [_row(campaign, check_quality_sum_bound(scheme, gv), seed)]
    if campaign == "induction":
        return [
            _row(campaign, check_quality_recursion(scheme, gv, r), seed)
            for r in range(2, s + 1)
        ]
    if campaign == "thm2":
        if (2 * N - 1) ** s > budget:
            return [_skipped(campaign, "t1-from-quality", n, s, seed)]
        return [_row(campaign, check_t1_bound(scheme, gv, budget=budget), seed)]
    if campaign == "prop1":
        if (2 * N - 1) ** s > budget:
            return [_skipped(campaign, "truncation-gap", n, s, seed)]
        return [
            _row(
                campaign,
                check_truncation_gap(scheme, gv, alpha=2, budget=budget),
                seed,
            )
        ]
    raise ValueError(f"unknown campaign {campaign!r}")


def _instance_rows_star(job: tuple) -> list[CampaignRow]:
    return instance_rows(*job)


def run_verify_campaign(
    campaign: str,
    n_max: int,
    s_max: int,
    draws: int,
    seed: int,
    budget: int = DUAL_SUM_BUDGET,
    workers: Optional[int] = None,
) -> list[CampaignRow]:
    """All rows of one campaign (or of all four) over the parameter grid."""
    if campaign != "all" and campaign not in CAMPAIGNS:
        raise ValueError(
            f"campaign must be 'all' or one of {CAMPAIGNS}, got {campaign!r}"
        )
    names = CAMPAIGNS if campaign == "all" else (campaign,)
    jobs = [
        (name, n, s, i, seed, budget)
        for name in names
        for n in range(1, n_max + 1)
        for s in range(1, s_max + 1)
        for i in range(draws)
    ]
    workers = resolve_workers(workers)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_instance_rows_star, jobs, chunksize=4))
    else:
        chunks = [_instance_rows_star(job) for job in jobs]
    return [row for chunk in chunks for row in chunk]


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    N: int
    dual_error: float


def convergence_run(
    alpha: int,
    n_first: int,
    n_last: int,
    s: int,
    scheme: WeightScheme,
) -> tuple[list[ConvergenceRow], float]:
    """Dual error of constructed vectors over a resolution range, plus the
    least-squares slope of ``log error`` against ``log N``."""
    if n_first > n_last:
        raise ValueError(
            f"empty resolution range {n_first}..{n_last}"
        )
    rows = []
    for n in range(n_first, n_last + 1):
        gv, _ = construct(ConstructionConfig(n, s, scheme))
        err = dual_error_even_alpha(alpha, scheme, gv)
        rows.append(ConvergenceRow(n, gv.N, err))
    log_n = np.log([row.N for row in rows])
    log_e = np.log([row.dual_error for row in rows])
    slope = float(np.polyfit(log_n, log_e, 1)[0]) if len(rows) > 1 else math.nan
    return rows, slope


@dataclass(frozen=True)
class BenchRow:
    path: str
    n: int
    s: int
    N: int
    median_seconds: float
    memory_doubles: float


def bench_scheme(path: str, s: int) -> WeightScheme:
    """Deterministic scheme used for timing runs."""
    gammas = tuple(1.0 / j**2 for j in range(1, s + 1))
    if path == "fast-product":
        return ProductWeights(gammas)
    if path == "fast-pod":
        Gammas = tuple(1.0 / math.factorial(ell) for ell in range(s + 1))
        return PodWeights((1.0,) + Gammas[1:], gammas)
    raise ValueError(f"bench path must be fast-pod or fast-product, got {path!r}")


def bench_run(
    path: str, n_list: list[int], s_list: list[int], repeats: int = 3
) -> list[BenchRow]:
    """Median construction wall time and state memory per grid point."""
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    rows = []
    for s in s_list:
        scheme = bench_scheme(path, s)
        for n in n_list:
            config = ConstructionConfig(n, s, scheme, path=path)
            times = []
            memory = 0.0
            for _ in range(repeats):
                _, diag = construct(config)
                times.append(diag.timing["construct_seconds"])
                memory = diag.bound_values["state_memory_doubles"]
            rows.append(
                BenchRow(path, n, s, 2**n, statistics.median(times), memory)
            )
    return rows


@dataclass(frozen=True)
class GrowthRatio:
    kind: str  # "N-doubling" or "s-doubling"
    n_from: int
    s_from: int
    n_to: int
    s_to: int
    ratio: float


def growth_ratios(rows: list[BenchRow]) -> list[GrowthRatio]:
    """Timing ratios along N-doubling and s-doubling steps of a bench grid."""
    index = {(row.n, row.s): row for row in rows}
    out = []
    for row in rows:
        successor = index.get((row.n + 1, row.s))
        if successor is not None and row.median_seconds > 0:
            out.append(
                GrowthRatio(
                    "N-doubling",
                    row.n,
                    row.s,
                    row.n + 1,
                    row.s,
                    successor.median_seconds / row.median_seconds,
                )
            )
    for row in rows:
        successor = index.get((row.n, 2 * row.s))
        if successor is not None and row.median_seconds > 0:
            out.append(
                GrowthRatio(
                    "s-doubling",
                    row.n,
                    row.s,
                    row.n,
                    2 * row.s,
                    successor.median_seconds / row.median_seconds,
                )
            )
    return out
