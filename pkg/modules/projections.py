# projections.py

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd

from modules.core_order import PointSet, closed_size, compress, decompose, integer_root, iter_segment

logger = logging.getLogger(__name__)

HYPERPLANE = "hyperplane"
AXIS = "axis"


@dataclass(frozen=True)
class ProjectionProfile:
    kind: str
    n: int
    size: int
    per_axis: tuple[int, ...]
    total: int

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "size": self.size,
            "per_axis": list(self.per_axis),
            "total": self.total,
        }

    def to_frame(self) -> pd.DataFrame:
        label = "|pi_i(A)|" if self.kind == HYPERPLANE else "|rho_i(A)|"
        df = pd.DataFrame({"axis": range(1, self.n + 1), label: list(self.per_axis)})
        return pd.concat(
            [df, pd.DataFrame({"axis": ["total"], label: [self.total]})],
            ignore_index=True,
        )


def _as_array(A: PointSet) -> np.ndarray:
    try:
        return np.array(sorted(A.points), dtype=np.int64).reshape(len(A), A.dim)
    except OverflowError:
        # coordinates beyond int64: relabel first, projections are unchanged
        return np.array(sorted(compress(A).points), dtype=np.int64).reshape(len(A), A.dim)


def _profile(kind: str, A: PointSet, per_axis: list[int]) -> ProjectionProfile:
    per_axis = tuple(int(v) for v in per_axis)
    return ProjectionProfile(kind=kind, n=A.dim, size=len(A), per_axis=per_axis, total=sum(per_axis))


def sigma_profile(A: PointSet) -> ProjectionProfile:
    """
    Sizes of the n coordinate-hyperplane projections of A.

    Projection i deletes coordinate i; in dimension 1 every non-empty set
    projects onto a single point.
    """
    if len(A) == 0:
        return _profile(HYPERPLANE, A, [0] * A.dim)
    if A.dim == 1:
        return _profile(HYPERPLANE, A, [1])

    arr = _as_array(A)
    per_axis = [np.unique(np.delete(arr, i, axis=1), axis=0).shape[0] for i in range(A.dim)]
    return _profile(HYPERPLANE, A, per_axis)


def lambda_profile(A: PointSet) -> ProjectionProfile:
    """Sizes of the n coordinate-axis projections of A."""
    if len(A) == 0:
        return _profile(AXIS, A, [0] * A.dim)

    arr = _as_array(A)
    per_axis = [np.unique(arr[:, i]).shape[0] for i in range(A.dim)]
    return _profile(AXIS, A, per_axis)


# =========================================================
# EXTREMAL VALUES
# =========================================================
def sigma_closed(n: int, K: int, i: int) -> int:
    """sigma of the closed box with i edges K+1 and n-i edges K, in exact integers."""
    if n < 1 or K < 1:
        raise ValueError(f"sigma_closed needs n >= 1 and K >= 1, got n={n}, K={K}.")
    if not 0 <= i <= n - 1:
        raise ValueError(f"Face index i must lie in [0, {n - 1}], got {i}.")

    longer = i * (K + 1) ** (i - 1) * K ** (n - i) if i > 0 else 0
    return longer + (n - i) * (K + 1) ** i * K ** (n - i - 1)


@lru_cache(maxsize=None)
def sigma_segment(n: int, m: int) -> int:
    if n < 1:
        raise ValueError(f"Dimension must be at least 1, got {n}.")
    if m < 0:
        raise ValueError(f"Segment length must be non-negative, got {m}.")
    if m == 0:
        return 0
    if n == 1:
        return 1

    d = decompose(n, m)
    return sigma_closed(n, d.K, d.i) + sigma_segment(n - 1, d.R)


def lambda_segment(n: int, m: int) -> int:
    # i runs over [0, n] here, unlike the face index of decompose
    if n < 1:
        raise ValueError(f"Dimension must be at least 1, got {n}.")
    if m < 0:
        raise ValueError(f"Segment length must be non-negative, got {m}.")
    if m == 0:
        return 0
    if n == 1:
        return m

    K = integer_root(m, n)
    i = next(i for i in range(n + 1) if m <= closed_size(n, K, i))
    return n * K + i


def lw_agm_holds(n: int, m: int) -> bool:
    """sigma_n(m)^n >= n^n m^(n-1), the root-free form of the projection lower bound."""
    if m == 0:
        return True
    return sigma_segment(n, m) ** n >= n ** n * m ** (n - 1)


def lw_agm_tight(n: int, m: int) -> bool:
    return m > 0 and sigma_segment(n, m) ** n == n ** n * m ** (n - 1)


def prefix_totals(n: int, m_max: int, kind: str = HYPERPLANE) -> list[int]:
    """Profile totals of I_n(m) for m = 0..m_max, counted incrementally along the cube order."""
    if kind not in (HYPERPLANE, AXIS):
        raise ValueError(f"Unknown projection kind {kind!r}.")

    seen = [set() for _ in range(n)]
    totals = [0]
    for p in iter_segment(n, m_max):
        for i in range(n):
            seen[i].add(p[:i] + p[i + 1:] if kind == HYPERPLANE else p[i])
        totals.append(sum(len(s) for s in seen))
    return totals
