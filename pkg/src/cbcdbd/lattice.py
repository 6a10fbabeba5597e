"""Rank-1 lattice point sets and their worst-case error functionals.

A rank-1 lattice rule with ``N = 2**n`` points is determined by a generating
vector ``z`` of odd integers; point ``k`` has coordinates ``frac(k * z_j / N)``.
This module provides the point set itself plus three exact functionals used
throughout the package:

* ``truncated_dual_sum``: the sum of reciprocal frequency decays over the
  non-zero dual-lattice frequencies inside the box ``|m_j| <= N - 1``,
* ``log_sine_sum``: the logarithmic sine-sum quality functional of a vector,
* ``dual_error_even_alpha``: the full dual-lattice error sum, available in
  closed form for even smoothness via Bernoulli polynomials.

All functionals take a weight scheme from :mod:`cbcdbd.weights`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import EnumerationBudgetError, SmoothnessError
from .weights import GENERAL_ENUM_CAP, WeightScheme, iter_subsets

# Largest supported resolution: products k * z_j must stay exact in int64.
MAX_N_EXPONENT = 30

# Default enumeration budget for the truncated dual sum, counted in
# candidate frequency vectors (2N - 1)**s.
DUAL_SUM_BUDGET = 10**8


@dataclass(frozen=True)
class GeneratingVector:
    """Generating vector of a rank-1 lattice rule with ``2**n`` points.

    Parameters
    ----------
    n : int
        Resolution exponent; the rule has ``N = 2**n`` nodes.
    z : tuple of int
        One odd integer in ``{1, ..., N - 1}`` per coordinate.
    digit_history : tuple of tuple of int, optional
        Row ``r`` holds the partial values of component ``r`` after each
        digit decision; entry ``v`` (1-based) must equal ``z_r mod 2**v``.
        Present on constructed vectors, absent on externally given ones.
    """

    n: int
    z: tuple[int, ...]
    digit_history: Optional[tuple[tuple[int, ...], ...]] = None

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if self.n > MAX_N_EXPONENT:
            raise ValueError(
                f"n = {self.n} exceeds the supported maximum "
                f"{MAX_N_EXPONENT} (index products must stay exact)"
            )
        z = tuple(int(c) for c in self.z)
        if len(z) == 0:
            raise ValueError("generating vector needs at least one component")
        N = 2**self.n
        for r, comp in enumerate(z, start=1):
            if not 1 <= comp <= N - 1 or comp % 2 == 0:
                raise ValueError(
                    f"component {r} must be an odd integer in 1..{N - 1}, "
                    f"got {comp}"
                )
        object.__setattr__(self, "z", z)
        if self.digit_history is not None:
            history = tuple(tuple(int(d) for d in row) for row in self.digit_history)
            if len(history) != len(z):
                raise ValueError("digit history needs one row per component")
            for r, row in enumerate(history, start=1):
                if len(row) != self.n:
                    raise ValueError(
                        f"digit history row {r} must have {self.n} entries"
                    )
                for v, partial in enumerate(row, start=1):
                    if partial != z[r - 1] % 2**v:
                        raise ValueError(
                            f"digit history row {r} entry {v} is {partial}, "
                            f"expected z_{r} mod 2^{v} = {z[r - 1] % 2 ** v}"
                        )
            object.__setattr__(self, "digit_history", history)

    @property
    def N(self) -> int:
        return 2**self.n

    @property
    def s(self) -> int:
        return len(self.z)

    def prefix(self, r: int) -> "GeneratingVector":
        """Vector restricted to the first ``r`` components."""
        if not 1 <= r <= self.s:
            raise ValueError(f"prefix length {r} outside 1..{self.s}")
        history = None
        if self.digit_history is not None:
            history = self.digit_history[:r]
        return GeneratingVector(self.n, self.z[:r], history)


@dataclass
class Diagnostics:
    """Optional measurements attached to a constructed vector."""

    log_sine_value: Optional[float] = None
    dual_sum_truncated: Optional[float] = None
    dual_error: Optional[float] = None
    bound_values: dict[str, float] = field(default_factory=dict)
    timing: dict[str, float] = field(default_factory=dict)


def lattice_points(gv: GeneratingVector) -> np.ndarray:
    """Node matrix of shape ``(N, s)``; row ``k`` is point ``k``.

    Coordinates are exact: ``(k * z_j mod N) / N`` is a dyadic rational
    below one, representable without rounding for ``N <= 2**53``.
    """
    N = gv.N
    k = np.arange(N, dtype=np.int64)
    cols = [((k * zj) % N).astype(np.float64) / N for zj in gv.z]
    return np.stack(cols, axis=1)


def fourier_decay(
    alpha: float, scheme: WeightScheme, m: Sequence[int]
) -> float:
    """Reciprocal importance of an integer frequency vector.

    Returns ``prod_{j in supp(m)} |m_j|**alpha / weight(supp(m))``; the
    zero frequency gives 1.  Smoothness ``alpha`` must be at least 1.
    """
    if alpha < 1:
        raise ValueError(f"smoothness must be >= 1, got {alpha}")
    supp = tuple(j + 1 for j, mj in enumerate(m) if int(mj) != 0)
    out = 1.0
    for j in supp:
        out *= float(abs(int(m[j - 1]))) ** alpha
    return out / scheme.weight(supp)


def _weights_by_mask(scheme: WeightScheme, s: int) -> np.ndarray:
    """Weight of every subset of {1..s}, indexed by bitmask."""
    out = np.empty(2**s, dtype=np.float64)
    for mask in range(2**s):
        subset = tuple(j + 1 for j in range(s) if mask >> j & 1)
        out[mask] = scheme.weight(subset)
    return out


def truncated_dual_sum(
    alpha: float,
    scheme: WeightScheme,
    gv: GeneratingVector,
    budget: int = DUAL_SUM_BUDGET,
) -> float:
    """Exact sum of ``1 / decay`` over truncated dual frequencies.

    Enumerates all non-zero ``m`` with ``|m_j| <= N - 1`` satisfying
    ``m . z == 0 (mod N)`` and sums the reciprocal of
    :func:`fourier_decay`.  Refuses instances whose candidate count
    ``(2N - 1)**s`` exceeds ``budget``.
    """
    if alpha < 1:
        raise ValueError(f"smoothness must be >= 1, got {alpha}")
    N, s = gv.N, gv.s
    candidates = (2 * N - 1) ** s
    if candidates > budget:
        raise EnumerationBudgetError(
            f"dual enumeration needs {candidates} candidates, beyond the "
            f"budget {budget}; pass a larger budget explicitly"
        )
    if s == 1:
        # The only multiple of an odd z inside |m| < N that is divisible
        # by N is m = 0, which is excluded.
        return 0.0

    gamma_mask = _weights_by_mask(scheme, s)
    coords = np.arange(1 - N, N, dtype=np.int64)
    decay_last = np.where(coords == 0, 1.0, np.abs(coords).astype(np.float64) ** alpha)
    nonzero_mid = (coords != 0).astype(np.int64)
    z = gv.z
    z_inv = pow(z[-1], -1, N)

    total = 0.0
    mid_dot = coords * z[s - 2]
    for outer in itertools.product(range(1 - N, N), repeat=s - 2):
        dot_out = sum(mj * zj for mj, zj in zip(outer, z))
        mask_out = 0
        decay_out = 1.0
        for j, mj in enumerate(outer):
            if mj != 0:
                mask_out |= 1 << j
                decay_out *= float(abs(mj)) ** alpha
        dot_pre = (dot_out + mid_dot) % N
        mask_pre = mask_out | (nonzero_mid << (s - 2))
        decay_pre = decay_out * decay_last
        solved = ((N - dot_pre) % N) * z_inv % N
        for last, in_range in (
            (solved, np.ones(coords.shape, dtype=bool)),
            (solved - N, solved >= 1),
        ):
            nz = last != 0
            mask_full = mask_pre | (nz.astype(np.int64) << (s - 1))
            decay_full = decay_pre * np.where(
                nz, np.abs(last).astype(np.float64) ** alpha, 1.0
            )
            keep = in_range & (mask_full > 0)
            contrib = np.where(
                keep, gamma_mask[mask_full] / decay_full, 0.0
            )
            total += float(np.sum(contrib))
    return total


def log_sine_table(n: int, odd_only: bool = False) -> np.ndarray:
    """Values ``log(1 / sin^2(pi * m / 2**t))`` for indices at level ``n``.

    With ``odd_only`` the table covers odd ``m < 2**n`` (entry ``(m-1)//2``),
    otherwise all ``m`` in ``1..2**n - 1`` (entry ``m - 1``).  Values for
    mirrored indices ``m`` and ``2**n - m`` are computed from the same
    floating-point expression, so the symmetry is exact bit for bit.
    """
    N = 2**n
    if odd_only:
        m = np.arange(1, N, 2, dtype=np.int64)
    else:
        m = np.arange(1, N, dtype=np.int64)
    folded = np.minimum(m, N - m).astype(np.float64)
    return -2.0 * np.log(np.sin(np.pi * (folded / N)))


def _gathered_columns(
    gv: GeneratingVector, values: np.ndarray, k: np.ndarray
) -> list[np.ndarray]:
    """Per-coordinate table lookups ``values[(k * z_j mod N) - 1]``."""
    N = gv.N
    return [values[((k * zj) % N) - 1] for zj in gv.z]


def log_sine_sum(
    scheme: WeightScheme, gv: GeneratingVector, cap: int = GENERAL_ENUM_CAP
) -> float:
    """Logarithmic sine-sum quality functional of a generating vector.

    Sums, over ``k = 1 .. N - 1`` and all non-empty coordinate subsets u,
    the subset weight times ``prod_{j in u} log(1 / sin^2(pi k z_j / N))``.
    Product and POD schemes use factored accumulation; any other scheme
    falls back to subset enumeration, refusing dimensions beyond ``cap``.
    """
    from .weights import PodWeights, ProductWeights

    N, s = gv.N, gv.s
    k = np.arange(1, N, dtype=np.int64)
    table = log_sine_table(gv.n)
    cols = _gathered_columns(gv, table, k)

    if isinstance(scheme, ProductWeights):
        acc = np.ones(N - 1, dtype=np.float64)
        for j, w in enumerate(cols):
            acc *= 1.0 + scheme.gammas[j] * w
        return float(np.sum(acc - 1.0))
    if isinstance(scheme, PodWeights):
        elem = np.zeros((s + 1, N - 1), dtype=np.float64)
        elem[0] = 1.0
        for j, w in enumerate(cols):
            gw = scheme.gammas[j] * w
            for ell in range(min(j + 1, s), 0, -1):
                elem[ell] += gw * elem[ell - 1]
        per_k = np.zeros(N - 1, dtype=np.float64)
        for ell in range(1, s + 1):
            per_k += scheme.Gammas[ell] * elem[ell]
        return float(np.sum(per_k))

    if s > cap:
        raise EnumerationBudgetError(
            f"subset enumeration over {s} coordinates exceeds cap {cap}"
        )
    per_k = np.zeros(N - 1, dtype=np.float64)
    for u in iter_subsets(range(1, s + 1)):
        prod = np.ones(N - 1, dtype=np.float64)
        for j in u:
            prod *= cols[j - 1]
        per_k += scheme.weight(u) * prod
    return float(np.sum(per_k))


# Bernoulli polynomials of even degree, hard-coded: the closed-form dual
# error only supports smoothness 2, 4 and 6.
_BERNOULLI_COEFFS = {
    2: (1.0, -1.0, 1.0 / 6.0),
    4: (1.0, -2.0, 1.0, 0.0, -1.0 / 30.0),
    6: (1.0, -3.0, 2.5, 0.0, -0.5, 0.0, 1.0 / 42.0),
}


def bernoulli_kernel(alpha: int, x: np.ndarray) -> np.ndarray:
    """Fourier kernel ``sum_{m != 0} exp(2 pi i m x) / |m|**alpha``.

    For even ``alpha`` this equals a scaled Bernoulli polynomial:
    ``(-1)**(alpha/2 + 1) * (2 pi)**alpha / alpha! * B_alpha(x)``.
    """
    if alpha not in _BERNOULLI_COEFFS:
        raise SmoothnessError(
            f"closed-form kernel exists only for smoothness 2, 4 or 6; "
            f"got {alpha!r}"
        )
    scale = (-1.0) ** (alpha // 2 + 1) * (2.0 * math.pi) ** alpha / math.factorial(alpha)
    return scale * np.polyval(_BERNOULLI_COEFFS[alpha], np.asarray(x, dtype=np.float64))


def dual_error_even_alpha(
    alpha: int,
    scheme: WeightScheme,
    gv: GeneratingVector,
    cap: int = GENERAL_ENUM_CAP,
) -> float:
    """Full dual-lattice error sum for even smoothness, in closed form.

    Equals the sum of ``1 / fourier_decay`` over all non-zero integer
    frequencies ``m`` with ``m . z == 0 (mod N)``, evaluated without
    truncation by averaging products of Bernoulli kernels over the nodes.
    """
    from .weights import PodWeights, ProductWeights

    N, s = gv.N, gv.s
    kernel = bernoulli_kernel(alpha, np.arange(N, dtype=np.float64) / N)
    k = np.arange(N, dtype=np.int64)
    cols = [kernel[(k * zj) % N] for zj in gv.z]

    if isinstance(scheme, ProductWeights):
        acc = np.ones(N, dtype=np.float64)
        for j, b in enumerate(cols):
            acc *= 1.0 + scheme.gammas[j] * b
        return float(np.sum(acc - 1.0)) / N
    if isinstance(scheme, PodWeights):
        elem = np.zeros((s + 1, N), dtype=np.float64)
        elem[0] = 1.0
        for j, b in enumerate(cols):
            gb = scheme.gammas[j] * b
            for ell in range(min(j + 1, s), 0, -1):
                elem[ell] += gb * elem[ell - 1]
        per_k = np.zeros(N, dtype=np.float64)
        for ell in range(1, s + 1):
            per_k += scheme.Gammas[ell] * elem[ell]
        return float(np.sum(per_k)) / N

    if s > cap:
        raise EnumerationBudgetError(
            f"subset enumeration over {s} coordinates exceeds cap {cap}"
        )
    per_k = np.zeros(N, dtype=np.float64)
    for u in iter_subsets(range(1, s + 1)):
        prod = np.ones(N, dtype=np.float64)
        for j in u:
            prod *= cols[j - 1]
        per_k += scheme.weight(u) * prod
    return float(np.sum(per_k)) / N


def qmc_integrate(
    gv: GeneratingVector, f: Callable[[np.ndarray], np.ndarray]
):
    """Equal-weight cubature of ``f`` over the lattice nodes.

    ``f`` receives the full ``(N, s)`` node matrix and must return one
    value per node; the result is their arithmetic mean.
    """
    pts = lattice_points(gv)
    vals = np.asarray(f(pts))
    if vals.shape != (gv.N,):
        raise ValueError(
            f"integrand must return shape ({gv.N},), got {vals.shape}"
        )
    return vals.mean().item()
