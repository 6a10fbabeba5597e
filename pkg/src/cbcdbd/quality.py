"""Digit-level quality function and its fast evaluation states.

The digit-by-digit search scores a candidate digit ``x`` for component ``r``
at level ``v`` by a weighted double sum over levels ``t = v .. n`` and odd
indices ``k < 2**t``.  Each term couples log-sine values of the previously
chosen components at level ``t`` with the log-sine value of the candidate at
level ``v``; level ``t`` enters with the factor ``2**-(t - v)``.

Three evaluation routes exist:

* :func:`digit_quality_naive` computes the defining double sum directly for
  any weight scheme (subset enumeration, capped),
* :class:`PodStateTable` maintains order-wise partial sums for POD weights,
* :class:`ProductStateTable` maintains a single product accumulator.

Both fast states are updated level by level as digits are fixed.  While
component ``r`` is under construction, levels below the current digit level
already hold component-``r`` data and levels at or above it still hold
component-``r - 1`` data; quality evaluation reads only the latter.  All
routes read their log-sine values from one shared :class:`SinLogTable`, so
values that agree mathematically agree bit for bit, and ties resolve
identically on every route.
"""

from __future__ import annotations

import numpy as np

from .errors import EnumerationBudgetError
from .lattice import log_sine_table
from .weights import (
    GENERAL_ENUM_CAP,
    PodWeights,
    ProductWeights,
    WeightScheme,
    iter_subsets,
)


class SinLogTable:
    """Log-sine lookup tables for levels ``2 .. n`` at odd indices.

    Level ``t`` stores ``log(1 / sin^2(pi * m / 2**t))`` for odd
    ``m < 2**t``.  An entry for a component with multiplier ``z`` is read
    at index ``k * z mod 2**t``, so the table depends on ``z`` only through
    that residue.  All entries are finite: odd residues never hit a zero
    of the sine.
    """

    def __init__(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        self.n = n
        self.levels: dict[int, np.ndarray] = {}
        self.odd_index: dict[int, np.ndarray] = {}
        for t in range(2, n + 1):
            self.levels[t] = log_sine_table(t, odd_only=True)
            self.odd_index[t] = np.arange(1, 2**t, 2, dtype=np.int64)

    def gathered(self, t: int, multiplier: int) -> np.ndarray:
        """Values at ``k * multiplier mod 2**t`` for all odd ``k < 2**t``."""
        residue = (self.odd_index[t] * multiplier) & (2**t - 1)
        return self.levels[t][(residue - 1) >> 1]

    def candidate_column(self, t: int, v: int, x: int) -> np.ndarray:
        """Level-``v`` values at ``k * x mod 2**v`` for odd ``k < 2**t``.

        The candidate digit always enters at its own level ``v`` even when
        the surrounding sum runs at a finer level ``t >= v``.
        """
        residue = (self.odd_index[t] * x) & (2**v - 1)
        return self.levels[v][(residue - 1) >> 1]

    @property
    def memory_doubles(self) -> int:
        """Allocated table entries (values plus index arrays)."""
        return 2 * sum(arr.size for arr in self.levels.values())


def digit_quality_naive(
    scheme: WeightScheme,
    table: SinLogTable,
    prev_z: tuple[int, ...],
    v: int,
    x: int,
    cap: int = GENERAL_ENUM_CAP,
) -> float:
    """Defining double sum of the digit quality function.

    Scores candidate ``x`` for component ``r = len(prev_z) + 1`` at digit
    level ``v``, given the finished components ``prev_z``.  Enumerates all
    subsets of the previous coordinates, so it works for every weight
    scheme but refuses more than ``cap`` previous coordinates.

    Levels are accumulated from ``t = n`` downward (smallest contributions
    first); both candidates of a digit step follow the identical order, so
    equal-by-symmetry candidates produce bit-identical values.
    """
    r = len(prev_z) + 1
    n = table.n
    if r - 1 > cap:
        raise EnumerationBudgetError(
            f"naive quality with {r - 1} previous coordinates exceeds "
            f"cap {cap}"
        )
    acc = 0.0
    for t in range(n, v - 1, -1):
        cols = [table.gathered(t, zj) for zj in prev_z]
        lx = table.candidate_column(t, v, x)
        size = table.odd_index[t].size
        without_candidate = np.zeros(size, dtype=np.float64)
        with_candidate = np.zeros(size, dtype=np.float64)
        for u in iter_subsets(range(1, r), include_empty=True):
            prod = np.ones(size, dtype=np.float64)
            for j in u:
                prod *= cols[j - 1]
            if u:
                without_candidate += scheme.weight(u) * prod
            with_candidate += scheme.weight(u + (r,)) * prod
        acc = acc / 2.0 + float(np.sum(without_candidate + lx * with_candidate))
    return acc


class PodStateTable:
    """Order-wise partial-sum state for fast POD-weight quality evaluation.

    For each level ``t`` the state keeps, per order ``ell``, the sum over
    all ``ell``-subsets of the finished coordinates of the order factor
    times the product of per-coordinate gamma-scaled log-sine values.  Two
    derived per-level rows are cached once per finished component: the
    plain sum over orders and the sum reweighted by the order-factor
    ratios.  A quality evaluation then costs one pass over the level
    entries, independent of the component index.
    """

    def __init__(self, scheme: PodWeights, n: int, s: int, table: SinLogTable) -> None:
        if s > scheme.s_max:
            raise ValueError(f"s = {s} exceeds scheme dimension {scheme.s_max}")
        if table.n != n:
            raise ValueError("table resolution does not match n")
        self.scheme = scheme
        self.n = n
        self.s = s
        self.table = table
        # rows[t][ell - 1] holds the order-ell sums at level t
        self.rows: dict[int, np.ndarray] = {
            t: np.zeros((s, table.odd_index[t].size), dtype=np.float64)
            for t in range(2, n + 1)
        }
        G1 = scheme.Gammas[1]
        g1 = scheme.gammas[0]
        for t in self.rows:
            # component 1 is always the identity multiplier
            self.rows[t][0] = G1 * g1 * table.levels[t]
        self.component = 1
        self.level_component = {t: 1 for t in self.rows}
        self._sum_plain: dict[int, np.ndarray] = {}
        self._sum_ratio: dict[int, np.ndarray] = {}
        self._refresh_level_sums()

    def _refresh_level_sums(self) -> None:
        # Consumed by component r + 1; pointless after the last component.
        r = self.component
        if r >= self.s:
            return
        G = self.scheme.Gammas
        for t, rows in self.rows.items():
            plain = rows[0].copy()
            ratio = (G[2] / G[1]) * rows[0]
            for ell in range(2, r + 1):
                plain += rows[ell - 1]
                ratio += (G[ell + 1] / G[ell]) * rows[ell - 1]
            self._sum_plain[t] = plain
            self._sum_ratio[t] = ratio

    def quality(self, v: int, x: int) -> float:
        """Digit quality of candidate ``x`` for the next component."""
        r = self.component + 1
        G1 = self.scheme.Gammas[1]
        gr = self.scheme.gammas[r - 1]
        acc = 0.0
        for t in range(self.n, v - 1, -1):
            if self.level_component[t] != self.component:
                raise RuntimeError(
                    f"level {t} holds component {self.level_component[t]} "
                    f"data, expected {self.component}"
                )
            lx = self.table.candidate_column(t, v, x)
            term = self._sum_plain[t] + (gr * lx) * (G1 + self._sum_ratio[t])
            acc = acc / 2.0 + float(np.sum(term))
        return acc

    def update(self, v: int, z_digit: int) -> None:
        """Fold the chosen partial value ``z_digit`` into level ``v``.

        Orders are updated in place from the highest down, so each order
        reads the not-yet-updated value of the order below it.
        """
        r = self.component + 1
        G = self.scheme.Gammas
        gr = self.scheme.gammas[r - 1]
        w = gr * self.table.gathered(v, z_digit)
        rows = self.rows[v]
        for ell in range(min(r, self.s), 0, -1):
            lower = rows[ell - 2] if ell >= 2 else 1.0
            rows[ell - 1] += (G[ell] / G[ell - 1]) * w * lower
        self.level_component[v] = r

    def finish_component(self) -> None:
        """Mark the next component finished and refresh the level caches."""
        r = self.component + 1
        for t, holder in self.level_component.items():
            if holder != r:
                raise RuntimeError(
                    f"cannot finish component {r}: level {t} still holds "
                    f"component {holder}"
                )
        self.component = r
        self._refresh_level_sums()

    @property
    def memory_doubles(self) -> int:
        total = sum(arr.size for arr in self.rows.values())
        total += sum(arr.size for arr in self._sum_plain.values())
        total += sum(arr.size for arr in self._sum_ratio.values())
        return total + self.table.memory_doubles


class ProductStateTable:
    """Single-accumulator state for fast product-weight quality evaluation.

    Per level the state keeps the sum over all non-empty subsets of the
    finished coordinates of the product of gamma-scaled log-sine values.
    Folding in a finished component multiplies the accumulator by one plus
    its scaled column and adds that column.
    """

    def __init__(
        self, scheme: ProductWeights, n: int, s: int, table: SinLogTable
    ) -> None:
        if s > scheme.s_max:
            raise ValueError(f"s = {s} exceeds scheme dimension {scheme.s_max}")
        if table.n != n:
            raise ValueError("table resolution does not match n")
        self.scheme = scheme
        self.n = n
        self.s = s
        self.table = table
        g1 = scheme.gammas[0]
        self.acc: dict[int, np.ndarray] = {
            t: g1 * table.levels[t] for t in range(2, n + 1)
        }
        self.component = 1
        self.level_component = {t: 1 for t in self.acc}

    def quality(self, v: int, x: int) -> float:
        r = self.component + 1
        gr = self.scheme.gammas[r - 1]
        acc = 0.0
        for t in range(self.n, v - 1, -1):
            if self.level_component[t] != self.component:
                raise RuntimeError(
                    f"level {t} holds component {self.level_component[t]} "
                    f"data, expected {self.component}"
                )
            q = self.acc[t]
            lx = self.table.candidate_column(t, v, x)
            term = q + (gr * lx) * (1.0 + q)
            acc = acc / 2.0 + float(np.sum(term))
        return acc

    def update(self, v: int, z_digit: int) -> None:
        r = self.component + 1
        scaled = self.scheme.gammas[r - 1] * self.table.gathered(v, z_digit)
        q = self.acc[v]
        q *= 1.0 + scaled
        q += scaled
        self.level_component[v] = r

    def finish_component(self) -> None:
        r = self.component + 1
        for t, holder in self.level_component.items():
            if holder != r:
                raise RuntimeError(
                    f"cannot finish component {r}: level {t} still holds "
                    f"component {holder}"
                )
        self.component = r

    @property
    def memory_doubles(self) -> int:
        total = sum(arr.size for arr in self.acc.values())
        return total + self.table.memory_doubles
