"""Multi-indices and admissible truncation sets.

Axes are numbered from 1 to ``n`` throughout the package; axis ``0`` is
reserved for the set of indices whose every unit shift stays inside ``K``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "MultiIndex",
    "AdmissibleSet",
    "shift",
    "is_admissible",
    "triangular",
    "rectangular",
    "close_extension",
    "border",
    "ext_border_condition",
    "omega",
    "minkowski_double",
]


class MultiIndex(tuple):
    """Exponent vector ``k = (k_1, ..., k_n)`` with non-negative entries.

    A thin ``tuple`` subclass, so instances hash and compare like plain tuples.
    """

    def __new__(cls, coords: Iterable[int]):
        coords = tuple(int(c) for c in coords)
        if any(c < 0 for c in coords):
            raise ValueError(f"negative coordinate in multi-index {coords}")
        return super().__new__(cls, coords)

    @property
    def dimension(self) -> int:
        return len(self)

    @property
    def degree(self) -> int:
        return sum(self)

    def __add__(self, other):
        if len(other) != len(self):
            raise ValueError("multi-indices of different dimension")
        return MultiIndex(a + b for a, b in zip(self, other))

    def __repr__(self) -> str:
        return f"MultiIndex{tuple(self)}"


def _sort_key(k: Sequence[int]):
    # degree first, then lexicographic with the first coordinate dominant
    return (sum(k), tuple(-c for c in k))


def shift(k: Sequence[int], j: int) -> MultiIndex:
    """Return ``k + e_j`` (axis ``j`` is 1-based)."""
    n = len(k)
    if not 1 <= j <= n:
        raise ValueError(f"axis {j} out of range 1..{n}")
    out = list(k)
    out[j - 1] += 1
    return MultiIndex(out)


def unit(n: int, j: int) -> MultiIndex:
    return shift((0,) * n, j)


def is_admissible(elements: Iterable[Sequence[int]]) -> bool:
    """Check the origin is present and every element has a chain down to it.

    Because every proper chain step removes one unit, it is enough that each
    nonzero element has at least one predecessor ``k - e_j`` that is itself
    reachable; elements are visited by increasing degree.
    """
    elements = [MultiIndex(k) for k in elements]
    if not elements:
        raise ValueError("empty index set")
    n = len(elements[0])
    if any(len(k) != n for k in elements):
        raise ValueError("elements of different dimension")
    pool = set(elements)
    origin = MultiIndex((0,) * n)
    if origin not in pool:
        return False
    reachable = {origin}
    for k in sorted(pool, key=_sort_key):
        if k == origin:
            continue
        for j in range(n):
            if k[j] > 0:
                prev = list(k)
                prev[j] -= 1
                if tuple(prev) in reachable:
                    reachable.add(k)
                    break
        else:
            return False
    return True


@dataclass(frozen=True)
class AdmissibleSet:
    """An indexed admissible truncation ``K = {k_0, ..., k_rho}``.

    The order of ``elements`` is the indexation used by every matrix built
    from the set.
    """

    elements: tuple[MultiIndex, ...]

    def __post_init__(self):
        elements = tuple(MultiIndex(k) for k in self.elements)
        object.__setattr__(self, "elements", elements)
        if not elements:
            raise ValueError("empty index set")
        if len(set(elements)) != len(elements):
            raise ValueError("duplicate elements in index set")
        if any(elements[0]):
            raise ValueError("the origin must be element 0")
        if not is_admissible(elements):
            raise ValueError("index set is not admissible")
        object.__setattr__(
            self, "_position", {k: i for i, k in enumerate(elements)}
        )

    @classmethod
    def from_elements(cls, elements: Iterable[Sequence[int]], sort: bool = False):
        elements = [MultiIndex(k) for k in elements]
        if sort:
            elements.sort(key=_sort_key)
        return cls(tuple(elements))

    @property
    def dimension(self) -> int:
        return len(self.elements[0])

    @property
    def rho(self) -> int:
        return len(self.elements) - 1

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i: int) -> MultiIndex:
        return self.elements[i]

    def __contains__(self, k) -> bool:
        return tuple(k) in self._position

    def index(self, k: Sequence[int]) -> int:
        return self._position[tuple(k)]

    def as_set(self) -> frozenset:
        return frozenset(self.elements)


def _generated(elements) -> AdmissibleSet:
    return AdmissibleSet(tuple(sorted(elements, key=_sort_key)))


def triangular(n: int, r: int) -> AdmissibleSet:
    """``K_r``: all multi-indices of total degree at most ``r``."""
    if n < 1 or r < 0:
        raise ValueError("need n >= 1 and r >= 0")
    return _generated(
        k for k in itertools.product(range(r + 1), repeat=n) if sum(k) <= r
    )


def rectangular(*bounds: int) -> AdmissibleSet:
    """``K_{d_1,...,d_n}``: all multi-indices with ``k_i <= d_i``."""
    if not bounds or any(d < 0 for d in bounds):
        raise ValueError("need at least one non-negative bound")
    return _generated(itertools.product(*(range(d + 1) for d in bounds)))


def close_extension(K: AdmissibleSet) -> AdmissibleSet:
    """``Ext K``: ``K`` together with all unit shifts of its elements.

    The indexation of ``K`` is kept as a prefix; new elements follow in
    degree/lexicographic order.
    """
    n = K.dimension
    new = {shift(k, j) for k in K for j in range(1, n + 1)} - K.as_set()
    return AdmissibleSet(K.elements + tuple(sorted(new, key=_sort_key)))


def border(K: AdmissibleSet) -> frozenset:
    n = K.dimension
    return frozenset(
        k for k in K if any(shift(k, j) not in K for j in range(1, n + 1))
    )


def ext_border_condition(K: AdmissibleSet) -> bool:
    """Whether every element of ``Ext K`` outside ``K`` lies on its border."""
    ext = close_extension(K)
    return (ext.as_set() - K.as_set()) <= border(ext)


def omega(K: AdmissibleSet, l: int) -> list[int]:
    """Indices ``j`` with ``k_j + e_l`` in ``K``; for ``l == 0`` all shifts."""
    n = K.dimension
    if not 0 <= l <= n:
        raise ValueError(f"axis {l} out of range 0..{n}")
    axes = range(1, n + 1) if l == 0 else (l,)
    return [
        j for j, k in enumerate(K) if all(shift(k, a) in K for a in axes)
    ]


def minkowski_double(K: AdmissibleSet) -> frozenset:
    """The moment index set ``K + K``."""
    return frozenset(a + b for a in K for b in K)


def sorted_indices(indices: Iterable[Sequence[int]]) -> list[MultiIndex]:
    """Sort multi-indices by degree, then lexicographically."""
    return sorted((MultiIndex(k) for k in indices), key=_sort_key)
