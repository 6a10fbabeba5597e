"""Figure rendering for campaign, convergence and timing reports.

Uses the non-interactive Agg backend so figures render identically in
headless environments; each function writes one PNG next to the delimited
output it illustrates.
"""

from __future__ import annotations

import math
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .campaigns import BenchRow, CampaignRow, ConvergenceRow


def convergence_figure(
    rows: list[ConvergenceRow], slope: float, out_path: str
) -> None:
    """Log-log dual error against node count with the fitted power law."""
    N = np.array([row.N for row in rows], dtype=float)
    err = np.array([row.dual_error for row in rows], dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.loglog(N, err, "o-", label="dual error")
    if len(rows) > 1 and math.isfinite(slope):
        anchor = err[0] * (N / N[0]) ** slope
        ax.loglog(N, anchor, "--", color="gray", label=f"slope {slope:.3f}")
    ax.set_xlabel("number of nodes N")
    ax.set_ylabel("weighted dual error")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def verify_figure(rows: list[CampaignRow], out_path: str) -> None:
    """Relative bound margins per checked instance, grouped by theorem."""
    by_theorem: dict[str, list[float]] = defaultdict(list)
    for row in rows:
        if row.satisfied == "skipped" or row.lhs is None or row.rhs is None:
            continue
        margin = (row.rhs - row.lhs) / max(1.0, abs(row.rhs))
        by_theorem[row.theorem].append(margin)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for theorem, margins in sorted(by_theorem.items()):
        ax.plot(range(len(margins)), margins, ".", label=theorem, alpha=0.7)
    ax.axhline(0.0, color="red", linewidth=1.0)
    ax.set_yscale("symlog", linthresh=1e-12)
    ax.set_xlabel("instance index within theorem")
    ax.set_ylabel("relative margin (rhs - lhs) / max(1, |rhs|)")
    if by_theorem:
        ax.legend()
    ax.grid(True, alpha=0.3)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def bench_figure(rows: list[BenchRow], out_path: str) -> None:
    """Construction time against node count (one curve per dimension) and
    against dimension (one curve per resolution)."""
    fig, (ax_n, ax_s) = plt.subplots(1, 2, figsize=(10.0, 4.5))
    by_s: dict[int, list[BenchRow]] = defaultdict(list)
    by_n: dict[int, list[BenchRow]] = defaultdict(list)
    for row in rows:
        by_s[row.s].append(row)
        by_n[row.n].append(row)
    for s, group in sorted(by_s.items()):
        group = sorted(group, key=lambda row: row.N)
        ax_n.loglog(
            [row.N for row in group],
            [row.median_seconds for row in group],
            "o-",
            label=f"s={s}",
        )
    ax_n.set_xlabel("number of nodes N")
    ax_n.set_ylabel("median construction seconds")
    ax_n.legend()
    ax_n.grid(True, which="both", alpha=0.3)
    for n, group in sorted(by_n.items()):
        group = sorted(group, key=lambda row: row.s)
        ax_s.loglog(
            [row.s for row in group],
            [row.median_seconds for row in group],
            "s-",
            label=f"n={n}",
        )
    ax_s.set_xlabel("dimension s")
    ax_s.set_ylabel("median construction seconds")
    ax_s.legend()
    ax_s.grid(True, which="both", alpha=0.3)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
