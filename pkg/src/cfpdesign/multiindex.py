"""Multi-index sets for multivariate polynomial spaces.

Sets are ordered: graded first by total degree, then reverse lexicographic
within each grade (alpha precedes beta when the last nonzero entry of
alpha - beta is negative). The ordering is part of the value; enrichment
appends to an existing set without re-sorting it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "MultiIndexSet",
    "grevlex_key",
    "total_degree",
    "hyperbolic_cross",
    "is_downward_closed",
    "enrich",
]

MAX_SET_SIZE = 10**7


def grevlex_key(alpha: tuple[int, ...]):
    """Sort key realizing the graded reverse-lexicographic order."""
    return (sum(alpha), tuple(reversed(alpha)))


@dataclass(frozen=True)
class MultiIndexSet:
    """An ordered, duplicate-free tuple of d-dimensional multi-indices."""

    dimension: int
    indices: tuple[tuple[int, ...], ...]
    _members: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if len(self.indices) == 0:
            raise ValueError("index set must be nonempty")
        members = frozenset(self.indices)
        if len(members) != len(self.indices):
            raise ValueError("duplicate multi-indices")
        for alpha in self.indices:
            if len(alpha) != self.dimension:
                raise ValueError(f"index {alpha} has wrong dimension")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative entry in index {alpha}")
        object.__setattr__(self, "_members", members)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, alpha) -> bool:
        return tuple(alpha) in self._members

    @property
    def max_degree(self) -> int:
        return max(sum(a) for a in self.indices)

    def degrees_by_coordinate(self) -> tuple[int, ...]:
        """Largest entry per coordinate; sizes the univariate tables."""
        return tuple(
            max(a[j] for a in self.indices) for j in range(self.dimension)
        )

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "indices": [list(a) for a in self.indices],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MultiIndexSet":
        return cls(
            dimension=int(data["dimension"]),
            indices=tuple(tuple(int(v) for v in a) for a in data["indices"]),
        )


def _td_recurse(d: int, k: int, out: list, prefix: tuple[int, ...]):
    if d == 1:
        for i in range(k + 1):
            out.append(prefix + (i,))
        return
    for i in range(k + 1):
        _td_recurse(d - 1, k - i, out, prefix + (i,))


def total_degree(dimension: int, degree: int) -> MultiIndexSet:
    """All alpha with |alpha| <= degree, grevlex-ordered."""
    if dimension < 1 or degree < 0:
        raise ValueError("need dimension >= 1 and degree >= 0")
    size = math.comb(degree + dimension, dimension)
    if size > MAX_SET_SIZE:
        raise ValueError(f"total-degree set would have {size} indices")
    out: list[tuple[int, ...]] = []
    _td_recurse(dimension, degree, out, ())
    out.sort(key=grevlex_key)
    return MultiIndexSet(dimension, tuple(out))


def _hc_recurse(d: int, budget: int, out: list, prefix: tuple[int, ...]):
    if d == 1:
        for i in range(budget):
            out.append(prefix + (i,))
            if len(out) > MAX_SET_SIZE:
                raise ValueError("hyperbolic-cross set exceeds the size guard")
        return
    v = 0
    while v + 1 <= budget:
        _hc_recurse(d - 1, budget // (v + 1), out, prefix + (v,))
        v += 1


def hyperbolic_cross(dimension: int, degree: int) -> MultiIndexSet:
    """All alpha with prod(alpha_j + 1) <= degree + 1, grevlex-ordered."""
    if dimension < 1 or degree < 0:
        raise ValueError("need dimension >= 1 and degree >= 0")
    out: list[tuple[int, ...]] = []
    _hc_recurse(dimension, degree + 1, out, ())
    out.sort(key=grevlex_key)
    return MultiIndexSet(dimension, tuple(out))


def is_downward_closed(index_set: MultiIndexSet) -> bool:
    """True when every alpha keeps all its backward neighbors in the set."""
    for alpha in index_set:
        for j in range(index_set.dimension):
            if alpha[j] > 0:
                below = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1 :]
                if below not in index_set:
                    return False
    return True


def enrich(index_set: MultiIndexSet, extra: int | None = None) -> MultiIndexSet:
    """Append `extra` indices drawn from the surrounding total-degree sets.

    Candidates are the grevlex-ordered members of the smallest total-degree
    superset not already in the set; the degree is raised as needed until
    enough are available. extra defaults to max(1, floor(0.05 * N)).
    """
    if not is_downward_closed(index_set):
        raise ValueError("enrichment requires a downward-closed index set")
    n_points = len(index_set)
    if extra is None:
        extra = max(1, int(0.05 * n_points))
    if extra < 1:
        raise ValueError("extra must be positive")
    level = index_set.max_degree
    box = total_degree(index_set.dimension, level)
    if len(box) == n_points:  # the set is exactly that total-degree set
        level += 1
        box = total_degree(index_set.dimension, level)
    surplus = [a for a in box if a not in index_set]
    while len(surplus) < extra:
        level += 1
        box = total_degree(index_set.dimension, level)
        surplus = [a for a in box if a not in index_set]
    return MultiIndexSet(
        index_set.dimension, index_set.indices + tuple(surplus[:extra])
    )
