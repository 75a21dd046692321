# oracle.py

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from multiprocessing import Pool

import numpy as np
import pandas as pd

from modules import settings
from modules.core_order import (
    PointSet,
    closed_edges,
    closed_size,
    decompose,
    hull_sizes,
    initial_segment,
    integer_root,
    is_closed,
    iter_segment,
    rank,
)
from modules.errors import BudgetExceededError
from modules.projections import (
    AXIS,
    HYPERPLANE,
    lambda_profile,
    lambda_segment,
    lw_agm_holds,
    lw_agm_tight,
    prefix_totals,
    sigma_profile,
    sigma_segment,
)
from modules.rearrange import find_relabelling, rearrange_to_segment

logger = logging.getLogger(__name__)


class Law(str, Enum):
    SUB_I = "sub_i"
    SUB_II = "sub_ii"
    SUB_III = "sub_iii"
    RESTATE = "restate"
    IDT = "idt"
    HZ19 = "hz19"
    LW_AGM = "lw_agm"
    LAMBDA_RESTATE = "lambda_restate"
    LAMBDA_CLOSED_FORM = "lambda_closed_form"
    STABILITY = "stability"
    LAMBDA_UNIQUENESS = "lambda_uniqueness"
    NON_CLOSED_MINIMISER = "non_closed_minimiser"
    RANDOM_LOWER_BOUND = "random_lower_bound"


# =========================================================
# RESULT TYPES
# =========================================================
@dataclass(frozen=True)
class OracleResult:
    kind: str
    n: int
    m: int
    box: tuple[int, ...]
    min_value: int
    minimiser_count: int
    witnesses: tuple[PointSet, ...] = ()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "m": self.m,
            "box": list(self.box),
            "min_value": self.min_value,
            "minimiser_count": self.minimiser_count,
            "witnesses": [[list(p) for p in w.sorted_points()] for w in self.witnesses],
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{
            "kind": self.kind,
            "n": self.n,
            "m": self.m,
            "box": "x".join(str(s) for s in self.box),
            "min_value": self.min_value,
            "minimiser_count": self.minimiser_count,
        }])


@dataclass
class LawReport:
    law: Law
    domain: dict
    violations: list = field(default_factory=list)
    cases_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "law": self.law.value,
            "domain": self.domain,
            "cases_checked": self.cases_checked,
            "violations": self.violations,
        }


def reports_frame(reports: list[LawReport]) -> pd.DataFrame:
    return pd.DataFrame([
        {
            "law": r.law.value,
            "domain": ", ".join(f"{k}={v}" for k, v in r.domain.items()),
            "cases_checked": r.cases_checked,
            "violations": len(r.violations),
        }
        for r in reports
    ])


# =========================================================
# BRUTE FORCE
# =========================================================
def _projection_codes(kind: str, cells: list[tuple[int, ...]], box: tuple[int, ...]) -> np.ndarray:
    """codes[c, i] identifies the image of cell c under projection i."""
    arr = np.array(cells, dtype=np.int64).reshape(len(cells), len(box))
    if kind == AXIS:
        return arr

    codes = np.zeros_like(arr)
    for i in range(len(box)):
        others = [j for j in range(len(box)) if j != i]
        code = np.zeros(len(cells), dtype=np.int64)
        for j in others:
            code = code * box[j] + arr[:, j]
        codes[:, i] = code
    return codes


def _scan_block(task) -> tuple[int, int, list[tuple[int, ...]]]:
    """All m-subsets whose smallest cell index is `first`, scanned in lexicographic order."""
    first, N, m, codes, chunk, keep = task
    rest = itertools.combinations(range(first + 1, N), m - 1)

    best, count, witnesses = None, 0, []
    while True:
        batch = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(rest, chunk)), dtype=np.int64
        )
        if m > 1 and batch.size == 0:
            break
        batch = batch.reshape(-1, m - 1) if m > 1 else np.zeros((1, 0), dtype=np.int64)
        subsets = np.hstack([np.full((batch.shape[0], 1), first, dtype=np.int64), batch])

        totals = np.zeros(subsets.shape[0], dtype=np.int64)
        for axis in range(codes.shape[1]):
            images = np.sort(codes[subsets, axis], axis=1)
            totals += 1 + np.count_nonzero(np.diff(images, axis=1), axis=1)

        low = int(totals.min())
        hits = np.flatnonzero(totals == low)
        if best is None or low < best:
            best, count, witnesses = low, 0, []
        if low == best:
            count += hits.size
            room = keep - len(witnesses) if keep is not None else hits.size
            witnesses.extend(tuple(int(c) for c in subsets[h]) for h in hits[:max(room, 0)])
        if m == 1:
            break
    return best, count, witnesses


def brute_force_min(
    kind: str,
    n: int,
    m: int,
    box: tuple[int, ...] | None = None,
    budget: int | None = None,
    threads: int = 1,
    keep_all: bool = False,
    witness_cap: int | None = None,
    chunk: int | None = None,
) -> OracleResult:
    """
    Exact minimum of the sigma (kind="hyperplane") or lambda (kind="axis")
    total over all m-subsets of the box [0, box_1-1] x ... x [0, box_n-1].

    Subsets are enumerated in lexicographic (not colexicographic) order of the
    cube-order ranks of their cells, so each block is the run of subsets
    sharing a first cell and witnesses come out ordered by that cell. Blocks may run in a
    process pool; the reduction (minimum, then count, then witnesses in block
    order) does not depend on the pool size.
    """
    if kind not in (HYPERPLANE, AXIS):
        raise ValueError(f"Unknown projection kind {kind!r}; use {HYPERPLANE!r} or {AXIS!r}.")
    if n < 1 or m < 1:
        raise ValueError(f"brute_force_min needs n >= 1 and m >= 1, got n={n}, m={m}.")
    budget = settings.ORACLE_BUDGET if budget is None else budget
    chunk = settings.ORACLE_CHUNK if chunk is None else chunk
    witness_cap = settings.WITNESS_CAP if witness_cap is None else witness_cap

    if box is None:
        box = (decompose(n, m).K + 1,) * n
    box = tuple(int(s) for s in box)
    if len(box) != n or any(s < 1 for s in box):
        raise ValueError(f"Box {box} must have {n} positive sides.")
    N = math.prod(box)
    if N < m:
        raise ValueError(f"Box {box} holds {N} cells, fewer than m={m}.")
    candidates = math.comb(N, m)
    if candidates > budget:
        raise BudgetExceededError(candidates, budget)

    cells = sorted(itertools.product(*(range(s) for s in box)), key=rank)
    codes = _projection_codes(kind, cells, box)
    keep = None if keep_all else witness_cap
    tasks = [(first, N, m, codes, chunk, keep) for first in range(N - m + 1)]

    logger.debug("oracle %s n=%d m=%d box=%s: %d candidates in %d blocks",
                 kind, n, m, box, candidates, len(tasks))
    if threads > 1:
        with Pool(threads) as pool:
            blocks = list(pool.imap(_scan_block, tasks))
    else:
        blocks = [_scan_block(t) for t in tasks]

    min_value = min(b[0] for b in blocks)
    minimiser_count = sum(b[1] for b in blocks if b[0] == min_value)
    found = [w for b in blocks if b[0] == min_value for w in b[2]]
    if not keep_all:
        found = found[:witness_cap]

    return OracleResult(
        kind=kind,
        n=n,
        m=m,
        box=box,
        min_value=min_value,
        minimiser_count=minimiser_count,
        witnesses=tuple(PointSet(n, frozenset(cells[c] for c in w)) for w in found),
    )


def is_cartesian_product(A: PointSet) -> list[int] | None:
    """Per-axis support sizes if A is the full product of its supports, else None."""
    if len(A) == 0:
        raise ValueError("is_cartesian_product needs a non-empty set.")
    supports = [len({p[j] for p in A.points}) for j in range(A.dim)]
    return supports if math.prod(supports) == len(A) else None


# =========================================================
# PRODUCT STRUCTURE OF MINIMISERS
# =========================================================
def _check_products(law, kind, n, m, expected, box, budget, threads) -> LawReport:
    result = brute_force_min(kind, n, m, box=box, budget=budget, threads=threads, keep_all=True)
    report = LawReport(law, {"n": n, "m": m, "box": list(result.box)}, cases_checked=len(result.witnesses))

    optimum = sigma_segment(n, m) if kind == HYPERPLANE else lambda_segment(n, m)
    if result.min_value != optimum:
        report.violations.append({"min_value": result.min_value, "expected": optimum})
    for w in result.witnesses:
        factors = is_cartesian_product(w)
        if factors is None or sorted(factors) != expected:
            report.violations.append({"minimiser": [list(p) for p in w.sorted_points()], "factors": factors})
    return report


def check_stability(n: int, K: int, i: int, box=None, budget=None, threads: int = 1) -> LawReport:
    """Every sigma-minimiser of a closed size is a product of i sides K+1 and n-i sides K."""
    if K < 1 or not 0 <= i <= n - 1:
        raise ValueError(f"check_stability needs K >= 1 and 0 <= i <= {n - 1}, got K={K}, i={i}.")
    m = closed_size(n, K, i)
    return _check_products(Law.STABILITY, HYPERPLANE, n, m, sorted(closed_edges(n, m)), box, budget, threads)


def check_lambda_uniqueness(n: int, K: int, i: int, box=None, budget=None, threads: int = 1) -> LawReport:
    """Every lambda-minimiser of size (K+1)^i K^(n-i) is the matching product; here i may equal n."""
    if K < 1 or not 0 <= i <= n:
        raise ValueError(f"check_lambda_uniqueness needs K >= 1 and 0 <= i <= {n}, got K={K}, i={i}.")
    m = closed_size(n, K, i)
    expected = sorted([K + 1] * i + [K] * (n - i))
    return _check_products(Law.LAMBDA_UNIQUENESS, AXIS, n, m, expected, box, budget, threads)


def check_non_closed_minimiser(K: int, C: int) -> LawReport:
    """[0,K-C] x [0,K+C] reaches sigma_2((K+1)^2 - C^2) without being an initial segment."""
    if not K >= C >= 1:
        raise ValueError(f"check_non_closed_minimiser needs K >= C >= 1, got K={K}, C={C}.")
    m = (K + 1) ** 2 - C ** 2
    A = PointSet(2, frozenset(itertools.product(range(K - C + 1), range(K + C + 1))))
    report = LawReport(Law.NON_CLOSED_MINIMISER, {"K": K, "C": C, "m": m}, cases_checked=1)

    sigma = sigma_profile(A).total
    if sigma != sigma_segment(2, m):
        report.violations.append({"sigma": sigma, "expected": sigma_segment(2, m)})
    if find_relabelling(A) is not None:
        report.violations.append({"reason": "set is an initial segment up to relabelling"})
    if is_closed(2, m) and sorted(is_cartesian_product(A)) == sorted(closed_edges(2, m)):
        report.violations.append({"reason": "factors match the closed segment"})
    return report


# =========================================================
# LAWS ON sigma_n(m)
# =========================================================
def _sigma_table(n: int, m_max: int) -> np.ndarray:
    return np.array([sigma_segment(n, m) for m in range(m_max + 1)], dtype=np.int64)


def check_lemma_sub(n: int, m_max: int, set_form_max: int = 60) -> list[LawReport]:
    """
    Exhaustive run of the three sub-additivity laws of sigma_n:

      (i)   sigma(l1) + sigma(l2) <= sigma(m1) + sigma(m2) for l1 <= m1 <= m2 <= l2,
            m1 + m2 = l1 + l2 and l2 closed;
      (ii)  sigma(m1 + m2) < sigma(m1) + sigma(m2) for m1, m2 >= 1;
      (iii) sigma_n(m) > sigma_{n-1}(m) for m >= 1 (n >= 2 only).

    Sizes up to set_form_max are also checked against the profiles of the
    materialised segments.
    """
    sigma = _sigma_table(n, m_max)
    reports = []

    first = LawReport(Law.SUB_I, {"n": n, "m_max": m_max})
    for l2 in range(1, m_max + 1):
        if not is_closed(n, l2):
            continue
        for l1 in range(0, l2 + 1):
            m1 = np.arange(l1, (l1 + l2) // 2 + 1)
            m2 = l1 + l2 - m1
            bad = m1[sigma[l1] + sigma[l2] > sigma[m1] + sigma[m2]]
            first.cases_checked += m1.size
            first.violations.extend(
                {"l1": l1, "l2": l2, "m1": int(a), "m2": int(l1 + l2 - a)} for a in bad
            )
    direct = prefix_totals(n, min(m_max, set_form_max))
    for m, total in enumerate(direct):
        first.cases_checked += 1
        if total != sigma[m]:
            first.violations.append({"m": m, "segment_sigma": total, "recursion": int(sigma[m])})
    reports.append(first)

    second = LawReport(Law.SUB_II, {"n": n, "m_max": m_max})
    for m1 in range(1, m_max // 2 + 1):
        m2 = np.arange(m1, m_max - m1 + 1)
        bad = m2[sigma[m1 + m2] >= sigma[m1] + sigma[m2]]
        second.cases_checked += m2.size
        second.violations.extend({"m1": m1, "m2": int(b)} for b in bad)
    reports.append(second)

    if n >= 2:
        lower = _sigma_table(n - 1, m_max)
        third = LawReport(Law.SUB_III, {"n": n, "m_max": m_max}, cases_checked=m_max)
        bad = np.flatnonzero(sigma[1:] <= lower[1:]) + 1
        third.violations.extend({"m": int(m)} for m in bad)
        reports.append(third)

    logger.info("lemma laws n=%d m_max=%d: %s", n, m_max,
                ", ".join(f"{r.law.value}={len(r.violations)}" for r in reports))
    return reports


def check_idt(n: int, m_max: int) -> LawReport:
    """sigma_n(m) = sigma_n(strict interior) + sigma_{n-1}(strict boundary), off by one at m = 1."""
    if n < 2:
        raise ValueError(f"check_idt needs n >= 2, got {n}.")
    report = LawReport(Law.IDT, {"n": n, "m_max": m_max}, cases_checked=m_max)
    for m in range(1, m_max + 1):
        h = hull_sizes(n, m)
        lhs = sigma_segment(n, m)
        rhs = sigma_segment(n, h.strict_interior) + sigma_segment(n - 1, h.strict_boundary)
        if lhs - rhs != (1 if m == 1 else 0):
            report.violations.append({"m": m, "lhs": lhs, "rhs": rhs})
    return report


def check_lw_agm(n: int, m_max: int) -> LawReport:
    report = LawReport(Law.LW_AGM, {"n": n, "m_max": m_max}, cases_checked=m_max + 1)
    for m in range(m_max + 1):
        if not lw_agm_holds(n, m):
            report.violations.append({"m": m, "reason": "bound fails"})
        elif m >= 1 and lw_agm_tight(n, m) != (integer_root(m, n) ** n == m):
            report.violations.append({"m": m, "reason": "equality off the perfect powers"})
    return report


def check_restate(n: int, s: int, m_list: list[int]) -> LawReport:
    """
    sigma_n(m_1 + ... + m_s) <= sigma_{n-1}(m_1) + ... + sigma_{n-1}(m_s) + max m_k,
    with the stack of slabs I_{n-1}(m_k) attaining the right-hand side.
    """
    m_list = [int(v) for v in m_list]
    if s < 1 or len(m_list) != s:
        raise ValueError(f"check_restate needs s >= 1 sizes, got s={s} and {len(m_list)} sizes.")
    if any(v < 0 for v in m_list):
        raise ValueError(f"Slab sizes must be non-negative, got {m_list}.")
    if n == 1 and max(m_list) > 1:
        raise ValueError("In dimension 1 every slab holds at most one point.")

    def lower(v: int) -> int:
        # a slab of a line is a point of R^0, which has no projections
        return 0 if n == 1 else sigma_segment(n - 1, v)

    lhs = sigma_segment(n, sum(m_list))
    rhs = sum(lower(v) for v in m_list) + max(m_list)
    report = LawReport(Law.RESTATE, {"n": n, "s": s, "m": m_list}, cases_checked=1)
    if lhs > rhs:
        report.violations.append({"m": m_list, "lhs": lhs, "rhs": rhs})

    slabs = [v for v in m_list if v > 0]
    witness = PointSet(n, frozenset(
        p + (k,) for k, v in enumerate(slabs) for p in iter_segment(n - 1, v)
    )) if n > 1 else PointSet(1, frozenset((k,) for k in range(len(slabs))))
    attained = sigma_profile(witness).total
    if attained != rhs:
        report.violations.append({"m": m_list, "witness_sigma": attained, "rhs": rhs})
    return report


def restate_suite(trials: int, n_max: int, s_max: int, m_max: int, seed: int = 0) -> LawReport:
    rng = np.random.default_rng(seed)
    report = LawReport(
        Law.RESTATE,
        {"trials": trials, "n_max": n_max, "s_max": s_max, "m_max": m_max, "seed": seed},
    )
    for _ in range(trials):
        n = int(rng.integers(2, n_max + 1))
        s = int(rng.integers(1, s_max + 1))
        m_list = rng.integers(0, m_max + 1, size=s).tolist()
        single = check_restate(n, s, m_list)
        report.cases_checked += single.cases_checked
        report.violations.extend(dict(v, n=n) for v in single.violations)
    return report


# =========================================================
# LAWS ON lambda_n(m)
# =========================================================
def check_hz19(n: int, m_max: int) -> LawReport:
    """lambda_n(m+1) - lambda_n(m) is 1 when I_n(m) is closed and 0 otherwise (m >= 1)."""
    report = LawReport(Law.HZ19, {"n": n, "m_max": m_max}, cases_checked=m_max)
    for m in range(1, m_max + 1):
        step = lambda_segment(n, m + 1) - lambda_segment(n, m)
        if step != int(is_closed(n, m)):
            report.violations.append({"m": m, "increment": step})
    return report


def check_lambda_laws(n: int, m_max: int, s_max: int) -> list[LawReport]:
    if n < 2:
        raise ValueError(f"check_lambda_laws needs n >= 2, got {n}.")
    reports = [check_hz19(n, m_max)]

    restated = LawReport(Law.LAMBDA_RESTATE, {"n": n, "m_max": m_max, "s_max": s_max})
    for m in range(1, m_max + 1):
        for s in range(1, s_max + 1):
            restated.cases_checked += 1
            if lambda_segment(n, s * m) > lambda_segment(n - 1, m) + s:
                restated.violations.append({"m": m, "s": s})
    reports.append(restated)

    closed_form = LawReport(Law.LAMBDA_CLOSED_FORM, {"n": n, "m_max": m_max}, cases_checked=m_max + 1)
    for m, total in enumerate(prefix_totals(n, m_max, AXIS)):
        if total != lambda_segment(n, m):
            closed_form.violations.append({"m": m, "segment_lambda": total, "formula": lambda_segment(n, m)})
    reports.append(closed_form)
    return reports


# =========================================================
# RANDOM SETS
# =========================================================
def random_lower_bound_suite(trials: int, n_max: int, m_max: int, coord_max: int, seed: int = 0) -> LawReport:
    """Seeded random sets: both lower bounds hold and every set rearranges into its segment."""
    if n_max < 2 or m_max < 1 or coord_max < 0:
        raise ValueError(f"Need n_max >= 2, m_max >= 1, coord_max >= 0; got {n_max}, {m_max}, {coord_max}.")
    rng = np.random.default_rng(seed)
    report = LawReport(
        Law.RANDOM_LOWER_BOUND,
        {"trials": trials, "n_max": n_max, "m_max": m_max, "coord_max": coord_max, "seed": seed},
    )

    for trial in range(trials):
        n = int(rng.integers(2, n_max + 1))
        side = coord_max + 1
        m = int(rng.integers(1, min(m_max, side ** n) + 1))
        flat = rng.choice(side ** n, size=m, replace=False)
        coords = np.unravel_index(flat, (side,) * n)
        A = PointSet.from_points(zip(*(c.tolist() for c in coords)), dim=n)
        report.cases_checked += 1

        sigma, lam = sigma_profile(A).total, lambda_profile(A).total
        if sigma < sigma_segment(n, m):
            report.violations.append({"trial": trial, "reason": "sigma below sigma_n(m)", "sigma": sigma})
        if lam < lambda_segment(n, m):
            report.violations.append({"trial": trial, "reason": "lambda below lambda_n(m)", "lambda": lam})
        try:
            trace = rearrange_to_segment(A)
        except Exception as exc:
            report.violations.append({"trial": trial, "reason": f"rearrange: {type(exc).__name__}: {exc}"})
            continue
        if trace.final != initial_segment(n, m) or trace.steps[-1].sigma != sigma_segment(n, m):
            report.violations.append({"trial": trial, "reason": "rearrange ended off the segment"})

    logger.info("random suite: %d trials, %d violations", trials, len(report.violations))
    return report


# pinned instances small enough for full enumeration
STABILITY_INSTANCES = [
    (2, 1, 1, (4, 4)),
    (2, 2, 0, (4, 4)),
    (2, 2, 1, (4, 4)),
    (2, 3, 0, (4, 4)),
    (2, 3, 1, (4, 4)),
    (3, 1, 2, (3, 3, 3)),
]
LAMBDA_UNIQUENESS_INSTANCES = [
    (2, 2, 0, (4, 4)),
    (3, 2, 0, (3, 3, 3)),
]
