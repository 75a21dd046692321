# core_order.py

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import pandas as pd

from modules import settings
from modules.errors import DimensionMismatchError, SegmentCapError

logger = logging.getLogger(__name__)

Point = tuple[int, ...]


# =========================================================
# POINT SETS
# =========================================================
@dataclass(frozen=True)
class PointSet:
    """A finite, duplicate-free set of lattice points of a common dimension."""

    dim: int
    points: frozenset

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"Dimension must be at least 1, got {self.dim}.")
        for p in self.points:
            if len(p) != self.dim:
                raise DimensionMismatchError(f"Point {p} does not have dimension {self.dim}.")
            if any(c < 0 for c in p):
                raise ValueError(f"Point {p} has a negative coordinate.")

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]], dim: int | None = None) -> "PointSet":
        pts = [tuple(int(c) for c in p) for p in points]
        if dim is None:
            if not pts:
                raise ValueError("Cannot infer the dimension of an empty point list; pass dim.")
            dim = len(pts[0])
        unique = frozenset(pts)
        if len(unique) != len(pts):
            raise ValueError(f"{len(pts) - len(unique)} duplicate point(s) in input.")
        return cls(dim, unique)

    @classmethod
    def empty(cls, dim: int) -> "PointSet":
        return cls(dim, frozenset())

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __contains__(self, point) -> bool:
        return tuple(point) in self.points

    def sorted_points(self) -> list[Point]:
        return sorted(self.points, key=rank)


@dataclass(frozen=True)
class CubeDecomposition:
    K: int
    i: int
    R: int


@dataclass(frozen=True)
class HullSizes:
    interior: int
    strict_interior: int
    closure: int
    strict_closure: int
    boundary: int
    strict_boundary: int


# =========================================================
# INTEGER HELPERS
# =========================================================
def integer_root(value: int, degree: int) -> int:
    """Floor of the degree-th root of value, exact for arbitrarily large integers."""
    if degree < 1:
        raise ValueError(f"Root degree must be at least 1, got {degree}.")
    if value < 0:
        raise ValueError(f"Cannot take the root of negative value {value}.")
    if degree == 1 or value < 2:
        return value

    # Newton from above: 2**ceil(bits/degree) exceeds the true root.
    guess = 1 << -(-value.bit_length() // degree)
    while True:
        better = ((degree - 1) * guess + value // guess ** (degree - 1)) // degree
        if better >= guess:
            break
        guess = better

    while guess ** degree > value:
        guess -= 1
    while (guess + 1) ** degree <= value:
        guess += 1
    return guess


def closed_size(n: int, K: int, i: int) -> int:
    return (K + 1) ** i * K ** (n - i)


# =========================================================
# CUBE ORDER
# =========================================================
def _check_same_dim(x: Sequence[int], y: Sequence[int]):
    if len(x) != len(y):
        raise DimensionMismatchError(f"Cannot compare {tuple(x)} and {tuple(y)}: dimensions differ.")
    if len(x) == 0:
        raise ValueError("Points must have dimension at least 1.")


def cube_cmp(x: Sequence[int], y: Sequence[int]) -> int:
    """
    Compare two points in cube order straight from the level-set definition.

    Returns -1, 0 or 1 (usable with functools.cmp_to_key). x precedes y when,
    at the highest level l0 whose level sets differ, the highest index j with
    differing membership has y_j == l0.
    """
    _check_same_dim(x, y)
    x, y = tuple(x), tuple(y)
    if x == y:
        return 0

    for level in sorted(set(x) | set(y), reverse=True):
        differing = [j for j in range(len(x)) if (x[j] == level) != (y[j] == level)]
        if differing:
            j = differing[-1]
            return -1 if y[j] == level else 1
    return 0


def rank(x: Sequence[int]) -> int:
    """0-based position of x in the cube order of its dimension."""
    x = tuple(int(c) for c in x)
    if not x:
        raise ValueError("Points must have dimension at least 1.")
    if any(c < 0 for c in x):
        raise ValueError(f"Point {x} has a negative coordinate.")

    total = 0
    while len(x) > 1:
        top = max(x)
        if top == 0:
            return total
        n = len(x)
        axis = n - 1 - x[::-1].index(top)
        total += closed_size(n, top, axis)
        x = x[:axis] + x[axis + 1:]
    return total + x[0]


cube_key = rank


def cube_cmp_by_rank(x: Sequence[int], y: Sequence[int]) -> int:
    _check_same_dim(x, y)
    rx, ry = rank(x), rank(y)
    return (rx > ry) - (rx < ry)


@lru_cache(maxsize=1 << 16)
def decompose(n: int, m: int) -> CubeDecomposition:
    """Split m as (K+1)^i K^(n-i) + R with K^n <= m < (K+1)^n and R below the face size."""
    if n < 1:
        raise ValueError(f"Dimension must be at least 1, got {n}.")
    if m < 1:
        raise ValueError(f"decompose is defined for m >= 1, got {m}.")

    K = integer_root(m, n)
    i = 0
    while i + 1 < n and closed_size(n, K, i + 1) <= m:
        i += 1
    return CubeDecomposition(K=K, i=i, R=m - closed_size(n, K, i))


def unrank(n: int, m: int) -> Point:
    if n < 1:
        raise ValueError(f"Dimension must be at least 1, got {n}.")
    if m < 0:
        raise ValueError(f"Position must be non-negative, got {m}.")
    if n == 1:
        return (m,)
    if m == 0:
        return (0,) * n

    d = decompose(n, m)
    face = unrank(n - 1, d.R)
    return face[:d.i] + (d.K,) + face[d.i:]


# =========================================================
# INITIAL SEGMENTS
# =========================================================
def iter_segment(n: int, m: int) -> Iterator[Point]:
    """Yield I_n(m) in cube order: the unit cube, then each new cube face by face."""
    if n < 1:
        raise ValueError(f"Dimension must be at least 1, got {n}.")
    if m <= 0:
        return
    if n == 1:
        yield from ((k,) for k in range(m))
        return

    yield (0,) * n
    emitted = 1
    K = 1
    while emitted < m:
        for i in range(n):
            take = min((K + 1) ** i * K ** (n - 1 - i), m - emitted)
            for face in iter_segment(n - 1, take):
                yield face[:i] + (K,) + face[i:]
            emitted += take
            if emitted >= m:
                return
        K += 1


def initial_segment(n: int, m: int, cap: int | None = None) -> PointSet:
    cap = settings.SEGMENT_CAP if cap is None else cap
    if m < 0:
        raise ValueError(f"Segment length must be non-negative, got {m}.")
    if m > cap:
        raise SegmentCapError(f"I_{n}({m}) exceeds the materialisation cap of {cap:,} points.")
    return PointSet(n, frozenset(iter_segment(n, m)))


def is_closed(n: int, m: int) -> bool:
    if m < 0:
        raise ValueError(f"Segment length must be non-negative, got {m}.")
    return m == 0 or decompose(n, m).R == 0


def previous_closed(n: int, m: int) -> int:
    """Largest closed length strictly below m (m >= 1)."""
    d = decompose(n, m)
    if d.R > 0:
        return closed_size(n, d.K, d.i)
    if d.i > 0:
        return closed_size(n, d.K, d.i - 1)
    if d.K == 1:
        return 0
    return closed_size(n, d.K - 1, n - 1)


def next_closed(n: int, m: int) -> int:
    """Smallest closed length strictly above m (m >= 0)."""
    if m == 0:
        return 1
    d = decompose(n, m)
    if d.i + 1 <= n - 1:
        return closed_size(n, d.K, d.i + 1)
    return (d.K + 1) ** n


def hull_sizes(n: int, m: int) -> HullSizes:
    if m < 1:
        raise ValueError(f"Hulls are defined for m >= 1, got {m}.")

    closed = is_closed(n, m)
    interior = m if closed else previous_closed(n, m)
    strict_interior = previous_closed(n, m)
    closure = m if closed else next_closed(n, m)
    return HullSizes(
        interior=interior,
        strict_interior=strict_interior,
        closure=closure,
        strict_closure=next_closed(n, m),
        boundary=m - interior,
        strict_boundary=m - strict_interior,
    )


def largest_edge(n: int, m: int) -> int:
    """Largest edge of the closure of I_n(m); equals the size of its projection on the first axis."""
    if m <= 0:
        return 0
    if n == 1:
        return m
    d = decompose(n, m)
    return d.K + 1 if (d.i > 0 or d.R > 0) else d.K


def closed_edges(n: int, m: int) -> list[int]:
    """Edge sizes, axis by axis, of the closed segment of length m."""
    if not is_closed(n, m) or m == 0:
        raise ValueError(f"I_{n}({m}) is not a non-empty closed segment.")
    d = decompose(n, m)
    return [d.K + 1] * d.i + [d.K] * (n - d.i)


# =========================================================
# RELABELLING
# =========================================================
def compress(A: PointSet) -> PointSet:
    """Map each axis' used values, in order, onto 0..s_j-1."""
    if len(A) == 0:
        return A

    frame = pd.DataFrame(sorted(A.points))
    columns = [pd.factorize(frame[j], sort=True)[0].tolist() for j in range(A.dim)]
    return PointSet(A.dim, frozenset(zip(*columns)))


def relabel(A: PointSet, perm: Sequence[int]) -> PointSet:
    """Permute coordinates: output coordinate t is input coordinate perm[t]."""
    perm = tuple(perm)
    if sorted(perm) != list(range(A.dim)):
        raise ValueError(f"{perm} is not a permutation of the {A.dim} axes.")
    return PointSet(A.dim, frozenset(tuple(p[j] for j in perm) for p in A.points))


def inverse_permutation(perm: Sequence[int]) -> tuple[int, ...]:
    inverse = [0] * len(perm)
    for t, j in enumerate(perm):
        inverse[j] = t
    return tuple(inverse)


def axis_permutations(n: int) -> Iterator[tuple[int, ...]]:
    """All axis permutations in lexicographic order."""
    return itertools.permutations(range(n))
