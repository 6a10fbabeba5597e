"""Coordinate weight schemes for weighted lattice-rule error functionals.

A weight scheme assigns a positive value to every subset ``u`` of the
coordinate indices ``{1, ..., s_max}``; the empty subset always has weight 1.
Three families are supported:

* product weights, ``gamma_u = prod_{j in u} gamma_j``,
* POD (product and order dependent) weights,
  ``gamma_u = Gamma_{|u|} * prod_{j in u} gamma_j`` with ``Gamma_0 = 1``,
* general weights, a complete explicit table over all non-empty subsets.

``ShiftedWeights`` wraps any scheme and re-anchors it at a fixed index set,
mapping ``u`` to the weight of ``u`` united with that set.  Schemes are
immutable; deriving a new scheme (for example by powering) returns a new
object.

Weights must be finite and strictly positive.  Zero weights, which would
declare coordinates inactive, are rejected rather than silently supported.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import EnumerationBudgetError, WeightSpecError

# Hard cap for operations that enumerate all subsets of {1..s}.  2^20 subset
# evaluations is the largest enumeration accepted by default; callers may
# override per call, but never silently.
GENERAL_ENUM_CAP = 20


def normalize_subset(u: Iterable[int], s_max: int) -> tuple[int, ...]:
    """Return ``u`` as a sorted tuple of distinct 1-based indices in range.

    Raises
    ------
    WeightSpecError
        If an index is not an integer in ``{1, ..., s_max}`` or repeats.
    """
    items = list(u)
    for j in items:
        if not isinstance(j, int) or isinstance(j, bool):
            raise WeightSpecError(f"subset index {j!r} is not an integer")
        if not 1 <= j <= s_max:
            raise WeightSpecError(
                f"subset index {j} outside valid range 1..{s_max}"
            )
    out = tuple(sorted(items))
    if len(set(out)) != len(out):
        raise WeightSpecError(f"subset {items!r} contains repeated indices")
    return out


def iter_subsets(
    indices: Iterable[int], include_empty: bool = False
) -> Iterator[tuple[int, ...]]:
    """Yield subsets of ``indices`` in (size, lexicographic) order."""
    pool = tuple(indices)
    start = 0 if include_empty else 1
    for size in range(start, len(pool) + 1):
        yield from itertools.combinations(pool, size)


def _check_positive(value: float, what: str) -> float:
    if isinstance(value, bool):
        raise WeightSpecError(f"{what} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise WeightSpecError(f"{what} must be finite and > 0, got {value!r}")
    return value


class WeightScheme:
    """Common interface of all weight schemes.

    Subclasses provide ``s_max``, ``weight`` and ``powered``;
    ``max_growth_ratio`` has a generic enumeration fallback.
    """

    s_max: int

    def weight(self, u: Iterable[int]) -> float:
        """Weight of the coordinate subset ``u`` (empty subset gives 1)."""
        raise NotImplementedError

    def powered(self, exponent: float) -> "WeightScheme":
        """Scheme whose every subset weight is the ``exponent`` power."""
        raise NotImplementedError

    def max_growth_ratio(
        self, j: int, cap: int = GENERAL_ENUM_CAP
    ) -> float:
        """Largest ratio weight(v + {j}) / weight(v) over v within {1..j-1}.

        Measures the worst-case multiplicative gain from adjoining
        coordinate ``j``; drives the summability diagnostic.  The generic
        route enumerates all 2^(j-1) subsets and refuses beyond ``cap``.
        """
        if not 1 <= j <= self.s_max:
            raise WeightSpecError(f"index {j} outside 1..{self.s_max}")
        if j - 1 > cap:
            raise EnumerationBudgetError(
                f"growth ratio at j={j} needs 2^{j - 1} subset evaluations, "
                f"beyond cap {cap}; pass a larger cap explicitly"
            )
        best = 0.0
        for v in iter_subsets(range(1, j), include_empty=True):
            ratio = self.weight(v + (j,)) / self.weight(v)
            if ratio > best:
                best = ratio
        return best


@dataclass(frozen=True)
class ProductWeights(WeightScheme):
    """Product weights: the weight of ``u`` is the product of its gammas.

    Parameters
    ----------
    gammas : tuple of float
        Per-coordinate weights ``(gamma_1, ..., gamma_{s_max})``.

    Examples
    --------
    >>> ProductWeights((0.5, 0.25)).weight((1, 2))
    0.125
    """

    gammas: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.gammas) == 0:
            raise WeightSpecError("product weights need at least one gamma")
        checked = tuple(
            _check_positive(g, f"gamma_{j + 1}")
            for j, g in enumerate(self.gammas)
        )
        object.__setattr__(self, "gammas", checked)

    @property
    def s_max(self) -> int:
        return len(self.gammas)

    def weight(self, u: Iterable[int]) -> float:
        out = 1.0
        for j in normalize_subset(u, self.s_max):
            out *= self.gammas[j - 1]
        return out

    def powered(self, exponent: float) -> "ProductWeights":
        return ProductWeights(tuple(g**exponent for g in self.gammas))

    def max_growth_ratio(
        self, j: int, cap: int = GENERAL_ENUM_CAP
    ) -> float:
        # gamma_{v+{j}} / gamma_v collapses to gamma_j for every v.
        if not 1 <= j <= self.s_max:
            raise WeightSpecError(f"index {j} outside 1..{self.s_max}")
        return self.gammas[j - 1]


@dataclass(frozen=True)
class PodWeights(WeightScheme):
    """POD weights: an order factor times a product of per-coordinate gammas.

    Parameters
    ----------
    Gammas : tuple of float
        Order factors ``(Gamma_0, Gamma_1, ..., Gamma_{s_max})`` with
        ``Gamma_0 == 1``.
    gammas : tuple of float
        Per-coordinate factors ``(gamma_1, ..., gamma_{s_max})``.

    Examples
    --------
    >>> PodWeights((1.0, 1.0, 2.0), (0.5, 0.25)).weight((1, 2))
    0.25
    """

    Gammas: tuple[float, ...]
    gammas: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.gammas) == 0:
            raise WeightSpecError("POD weights need at least one gamma")
        if len(self.Gammas) != len(self.gammas) + 1:
            raise WeightSpecError(
                f"POD needs s_max + 1 = {len(self.gammas) + 1} order factors, "
                f"got {len(self.Gammas)}"
            )
        if float(self.Gammas[0]) != 1.0:
            raise WeightSpecError(
                f"order factor Gamma_0 must equal 1, got {self.Gammas[0]!r}"
            )
        object.__setattr__(
            self,
            "Gammas",
            tuple(
                _check_positive(G, f"Gamma_{ell}")
                for ell, G in enumerate(self.Gammas)
            ),
        )
        object.__setattr__(
            self,
            "gammas",
            tuple(
                _check_positive(g, f"gamma_{j + 1}")
                for j, g in enumerate(self.gammas)
            ),
        )

    @property
    def s_max(self) -> int:
        return len(self.gammas)

    def weight(self, u: Iterable[int]) -> float:
        subset = normalize_subset(u, self.s_max)
        out = self.Gammas[len(subset)]
        for j in subset:
            out *= self.gammas[j - 1]
        return out

    def powered(self, exponent: float) -> "PodWeights":
        return PodWeights(
            tuple(G**exponent for G in self.Gammas),
            tuple(g**exponent for g in self.gammas),
        )

    def max_growth_ratio(
        self, j: int, cap: int = GENERAL_ENUM_CAP
    ) -> float:
        # Only |v| matters: the ratio is gamma_j * Gamma_{l+1} / Gamma_l
        # maximized over sizes l = 0 .. j-1.
        if not 1 <= j <= self.s_max:
            raise WeightSpecError(f"index {j} outside 1..{self.s_max}")
        return self.gammas[j - 1] * max(
            self.Gammas[ell + 1] / self.Gammas[ell] for ell in range(j)
        )


@dataclass(frozen=True)
class GeneralWeights(WeightScheme):
    """General weights given by a complete subset table.

    The table must cover every non-empty subset of ``{1, ..., s_max}``;
    a missing subset is a load-time error, not a silent default.  The
    dimension is capped (default 20) because evaluation enumerates subsets.
    """

    dimension: int
    table: Mapping[tuple[int, ...], float]

    def __post_init__(self) -> None:
        if not isinstance(self.dimension, int) or self.dimension < 1:
            raise WeightSpecError(
                f"s_max must be a positive integer, got {self.dimension!r}"
            )
        if self.dimension > GENERAL_ENUM_CAP:
            raise WeightSpecError(
                f"general weight tables support s_max <= {GENERAL_ENUM_CAP}, "
                f"got {self.dimension}"
            )
        clean: dict[tuple[int, ...], float] = {}
        for raw, value in dict(self.table).items():
            subset = normalize_subset(raw, self.dimension)
            if len(subset) == 0:
                raise WeightSpecError(
                    "the empty subset is fixed at weight 1 and may not be "
                    "listed in a general table"
                )
            if subset in clean:
                raise WeightSpecError(f"subset {subset} listed twice")
            clean[subset] = _check_positive(value, f"weight of {subset}")
        missing = [
            u
            for u in iter_subsets(range(1, self.dimension + 1))
            if u not in clean
        ]
        if missing:
            raise WeightSpecError(
                f"general table incomplete: {len(missing)} subsets missing, "
                f"first {missing[0]}"
            )
        object.__setattr__(self, "table", clean)

    @property
    def s_max(self) -> int:
        return self.dimension

    def weight(self, u: Iterable[int]) -> float:
        subset = normalize_subset(u, self.dimension)
        if len(subset) == 0:
            return 1.0
        return self.table[subset]

    def powered(self, exponent: float) -> "GeneralWeights":
        return GeneralWeights(
            self.dimension,
            {u: w**exponent for u, w in self.table.items()},
        )


@dataclass(frozen=True)
class ShiftedWeights(WeightScheme):
    """View of a base scheme with every query united with a fixed set.

    ``ShiftedWeights(base, v).weight(u) == base.weight(u | v)``.  Shifting
    first by ``v`` and then by ``w`` equals shifting once by ``v | w``.
    """

    base: WeightScheme
    shift: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "shift", normalize_subset(self.shift, self.base.s_max)
        )

    @property
    def s_max(self) -> int:
        return self.base.s_max

    def weight(self, u: Iterable[int]) -> float:
        subset = normalize_subset(u, self.s_max)
        united = tuple(sorted(set(subset) | set(self.shift)))
        return self.base.weight(united)

    def powered(self, exponent: float) -> "ShiftedWeights":
        return ShiftedWeights(self.base.powered(exponent), self.shift)


def shifted(scheme: WeightScheme, anchor: Iterable[int]) -> ShiftedWeights:
    """Re-anchor ``scheme`` at ``anchor``, collapsing nested shifts."""
    if isinstance(scheme, ShiftedWeights):
        merged = set(scheme.shift) | set(anchor)
        return ShiftedWeights(scheme.base, tuple(sorted(merged)))
    return ShiftedWeights(scheme, tuple(anchor))


# ---------------------------------------------------------------------------
# JSON interchange format
# ---------------------------------------------------------------------------

_ALLOWED_KEYS = {"kind", "s_max", "gammas", "Gammas", "values"}
_REQUIRED_KEYS = {
    "product": {"kind", "s_max", "gammas"},
    "pod": {"kind", "s_max", "gammas", "Gammas"},
    "general": {"kind", "s_max", "values"},
}


def scheme_from_dict(payload: Mapping[str, object]) -> WeightScheme:
    """Build a weight scheme from the JSON interchange structure.

    The structure carries ``kind`` ("product", "pod" or "general"),
    ``s_max`` and the kind-specific fields ``gammas``, ``Gammas`` or
    ``values``.  Unknown fields are rejected.
    """
    if not isinstance(payload, Mapping):
        raise WeightSpecError("weight spec must be a JSON object")
    unknown = set(payload) - _ALLOWED_KEYS
    if unknown:
        raise WeightSpecError(
            f"unknown weight spec fields: {sorted(unknown)}"
        )
    kind = payload.get("kind")
    if kind not in _REQUIRED_KEYS:
        raise WeightSpecError(
            f"weight kind must be one of {sorted(_REQUIRED_KEYS)}, "
            f"got {kind!r}"
        )
    required = _REQUIRED_KEYS[kind]
    missing = required - set(payload)
    if missing:
        raise WeightSpecError(f"weight spec missing fields {sorted(missing)}")
    extra = set(payload) - required
    if extra:
        raise WeightSpecError(
            f"fields {sorted(extra)} not valid for kind {kind!r}"
        )
    s_max = payload["s_max"]
    if not isinstance(s_max, int) or isinstance(s_max, bool) or s_max < 1:
        raise WeightSpecError(f"s_max must be a positive integer, got {s_max!r}")

    def _float_list(name: str, expected_len: int) -> tuple[float, ...]:
        raw = payload[name]
        if not isinstance(raw, list) or len(raw) != expected_len:
            raise WeightSpecError(
                f"{name} must be a list of {expected_len} numbers"
            )
        out = []
        for x in raw:
            if not isinstance(x, (int, float)) or isinstance(x, bool):
                raise WeightSpecError(f"{name} entry {x!r} is not a number")
            out.append(float(x))
        return tuple(out)

    if kind == "product":
        return ProductWeights(_float_list("gammas", s_max))
    if kind == "pod":
        return PodWeights(
            _float_list("Gammas", s_max + 1), _float_list("gammas", s_max)
        )
    raw_values = payload["values"]
    if not isinstance(raw_values, list):
        raise WeightSpecError("values must be a list of subset entries")
    table: dict[tuple[int, ...], float] = {}
    for entry in raw_values:
        if not isinstance(entry, Mapping) or set(entry) != {
            "subset",
            "value",
        }:
            raise WeightSpecError(
                f"each value entry needs exactly the fields subset and "
                f"value, got {entry!r}"
            )
        raw_subset = entry["subset"]
        if not isinstance(raw_subset, list):
            raise WeightSpecError(f"subset must be a list, got {raw_subset!r}")
        value = entry["value"]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise WeightSpecError(f"value {value!r} is not a number")
        subset = normalize_subset(raw_subset, s_max)
        if subset in table:
            raise WeightSpecError(f"subset {subset} listed twice")
        table[subset] = float(value)
    return GeneralWeights(s_max, table)


def scheme_to_dict(scheme: WeightScheme) -> dict[str, object]:
    """Serialize a scheme back to the JSON interchange structure."""
    if isinstance(scheme, ProductWeights):
        return {
            "kind": "product",
            "s_max": scheme.s_max,
            "gammas": list(scheme.gammas),
        }
    if isinstance(scheme, PodWeights):
        return {
            "kind": "pod",
            "s_max": scheme.s_max,
            "gammas": list(scheme.gammas),
            "Gammas": list(scheme.Gammas),
        }
    if isinstance(scheme, GeneralWeights):
        return {
            "kind": "general",
            "s_max": scheme.s_max,
            "values": [
                {"subset": list(u), "value": scheme.table[u]}
                for u in iter_subsets(range(1, scheme.s_max + 1))
            ],
        }
    raise WeightSpecError(
        f"cannot serialize scheme of type {type(scheme).__name__}"
    )


def load_weights(path: str) -> WeightScheme:
    """Load a weight scheme from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise WeightSpecError(f"invalid JSON in {path}: {exc}") from exc
    return scheme_from_dict(payload)


def save_weights(scheme: WeightScheme, path: str) -> None:
    """Write a weight scheme to a JSON file."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scheme_to_dict(scheme), fh, indent=2)
        fh.write("\n")
