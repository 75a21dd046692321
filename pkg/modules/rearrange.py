# rearrange.py

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass

import pandas as pd

from modules import settings
from modules.core_order import (
    PointSet,
    axis_permutations,
    closed_edges,
    compress,
    decompose,
    hull_sizes,
    initial_segment,
    iter_segment,
    largest_edge,
    next_closed,
    previous_closed,
    relabel,
)
from modules.errors import PreconditionError, RearrangeInvariantError
from modules.projections import lambda_profile, sigma_profile

logger = logging.getLogger(__name__)

FOLDED = "folded"
SQUARE = "square"
FINISHED = "finished"


# =========================================================
# TYPES
# =========================================================
@dataclass(frozen=True)
class Slab:
    level: int
    body: PointSet


@dataclass(frozen=True)
class TraceStep:
    label: str
    points: PointSet
    sigma: int

    def to_dict(self, points_limit: int | None = None) -> dict:
        limit = settings.TRACE_POINTS_LIMIT if points_limit is None else points_limit
        points = None
        if len(self.points) <= limit:
            points = [list(p) for p in self.points.sorted_points()]
        return {"label": self.label, "size": len(self.points), "sigma": self.sigma, "points": points}


@dataclass(frozen=True)
class RearrangeTrace:
    input: PointSet
    steps: tuple[TraceStep, ...]
    final: PointSet

    def to_records(self, points_limit: int | None = None, full: bool = False) -> list[dict]:
        if full:
            points_limit = max((len(s.points) for s in self.steps), default=0)
        return [step.to_dict(points_limit) for step in self.steps]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"step": k, "label": s.label, "size": len(s.points), "sigma": s.sigma}
             for k, s in enumerate(self.steps)]
        )


class _Recorder:
    """Keeps the trace and enforces size conservation and sigma non-increase on every step."""

    def __init__(self, A: PointSet):
        self.size = len(A)
        self.steps = [TraceStep("input", A, sigma_profile(A).total)]

    @property
    def sigma(self) -> int:
        return self.steps[-1].sigma

    def record(self, label: str, A: PointSet):
        if A == self.steps[-1].points:
            return
        if len(A) != self.size:
            raise RearrangeInvariantError(f"{label}: size changed from {self.size} to {len(A)}.")
        sigma = sigma_profile(A).total
        if sigma > self.sigma:
            raise RearrangeInvariantError(f"{label}: sigma increased from {self.sigma} to {sigma}.")
        logger.debug("%s (sigma %d -> %d)", label, self.sigma, sigma)
        self.steps.append(TraceStep(label, A, sigma))

    def finish(self, target: PointSet) -> RearrangeTrace:
        final = self.steps[-1].points
        if final != target:
            raise RearrangeInvariantError(
                f"Pipeline ended on a set that is not I_{target.dim}({len(target)})."
            )
        return RearrangeTrace(input=self.steps[0].points, steps=tuple(self.steps), final=final)


def _recorder_for(A: PointSet, recorder: _Recorder | None) -> _Recorder:
    return recorder if recorder is not None else _Recorder(A)


# =========================================================
# STACKS OF SEGMENT SLABS
# =========================================================
def slab_decomposition(A: PointSet) -> list[Slab]:
    """Split A along its last coordinate, in increasing level order."""
    if A.dim < 2:
        raise PreconditionError("Slabs need dimension at least 2; in dimension 1 they are single points.")
    if len(A) == 0:
        raise PreconditionError("Cannot decompose an empty set into slabs.")

    levels = defaultdict(set)
    for p in A.points:
        levels[p[-1]].add(p[:-1])
    return [Slab(level, PointSet(A.dim - 1, frozenset(levels[level]))) for level in sorted(levels)]


def _stack(n: int, bodies: list[PointSet]) -> PointSet:
    return PointSet(n, frozenset(p + (k,) for k, body in enumerate(bodies) for p in body.points))


def stack_set(n: int, sizes: list[int]) -> PointSet:
    """Slab k is I_{n-1}(sizes[k]) lifted to level k."""
    return _stack(n, [initial_segment(n - 1, s) for s in sizes])


def _require_stack(A: PointSet) -> list[int]:
    slabs = slab_decomposition(A)
    sizes = [len(s.body) for s in slabs]
    if [s.level for s in slabs] != list(range(len(slabs))):
        raise PreconditionError("Slabs do not occupy consecutive levels from 0.")
    if any(a < b for a, b in zip(sizes, sizes[1:])):
        raise PreconditionError(f"Slab sizes {sizes} are not non-increasing.")
    if any(s.body != initial_segment(A.dim - 1, len(s.body)) for s in slabs):
        raise PreconditionError("Some slab is not an initial segment of its hyperplane.")
    return sizes


def _segment_body(body: PointSet) -> PointSet:
    target = initial_segment(body.dim, len(body))
    if body == target or body.dim == 1 or len(body) <= 1:
        return target
    return rearrange_to_segment(body).final


def _swap_first_last(n: int) -> tuple[int, ...]:
    return (n - 1,) + tuple(range(1, n - 1)) + (0,)


# =========================================================
# STEPS
# =========================================================
def step1_normalize(A: PointSet, recorder: _Recorder | None = None) -> PointSet:
    """
    Restack slabs by non-increasing size, make every slab an initial segment
    of its hyperplane, and swap the first and last axes while the largest
    edge K of the bottom slab's closure is below the height H.

    Every swap lowers H, so the loop ends with H <= K.
    """
    n = A.dim
    if n < 2 or len(A) < 2:
        raise PreconditionError(f"step1 needs n >= 2 and |A| >= 2, got n={n}, |A|={len(A)}.")
    rec = _recorder_for(A, recorder)

    current = A
    while True:
        ordered = sorted(slab_decomposition(current), key=lambda s: len(s.body), reverse=True)
        current = _stack(n, [s.body for s in ordered])
        rec.record("step1: restack slabs by size", current)

        current = _stack(n, [_segment_body(s.body) for s in ordered])
        rec.record("step1: slabs to initial segments", current)

        K, H = largest_edge(n - 1, len(ordered[0].body)), len(ordered)
        if K >= H:
            return current
        current = relabel(current, _swap_first_last(n))
        rec.record(f"step1: swap axes 1 and {n} (K={K} < H={H})", current)


def step2_align_interiors(A: PointSet, recorder: _Recorder | None = None) -> PointSet:
    """
    Raise every slab strictly between the bottom and the top to the interior
    of the bottom slab, paying with points from the top slab.

    When the top slab fits into the deficient slab the two are merged, which
    strictly lowers sigma; the merged stack is returned at once and the caller
    renormalises it.
    """
    n = A.dim
    sizes = _require_stack(A)
    rec = _recorder_for(A, recorder)
    c0 = hull_sizes(n - 1, sizes[0]).interior

    while True:
        short = [k for k in range(1, len(sizes) - 1) if sizes[k] < c0]
        if not short:
            return stack_set(n, sizes)
        k = short[0]
        top = sizes[-1]
        if sizes[k] + top <= c0:
            sizes = sizes[:k] + [sizes[k] + top] + sizes[k + 1:-1]
            current = stack_set(n, sizes)
            rec.record(f"step2 merge: top slab into slab {k}", current)
            return current
        sizes[-1] = top + sizes[k] - c0
        sizes[k] = c0
        rec.record(f"step2 transfer: slab {k} up to the interior ({c0})", stack_set(n, sizes))


def _require_aligned(A: PointSet, step: str) -> list[int]:
    sizes = _require_stack(A)
    c0 = hull_sizes(A.dim - 1, sizes[0]).interior
    short = [k for k in range(1, len(sizes) - 1) if sizes[k] < c0]
    if short:
        raise PreconditionError(
            f"{step} needs every middle slab to hold the bottom slab's interior ({c0}); "
            f"slabs {short} of {sizes} do not."
        )
    return sizes


def _box(edges: list[int]) -> frozenset:
    return frozenset(itertools.product(*(range(e) for e in edges)))


def _face_segment(edges: list[int], axis: int, size: int) -> frozenset:
    """
    I_{n-1}(size) laid on the face just beyond the box across `axis`, the
    remaining axes taken longest edge first.
    """
    others = sorted((t for t in range(len(edges)) if t != axis), key=lambda t: -edges[t])
    points = set()
    for face in iter_segment(len(edges) - 1, size):
        p = [0] * len(edges)
        p[axis] = edges[axis]
        for t, v in zip(others, face):
            p[t] = v
        points.add(tuple(p))
    return frozenset(points)


def _reshape_boundary(A: PointSet, core: int, height: int, label: str, rec: _Recorder) -> PointSet:
    """
    Below `height`, every slab holds the closed segment I_{n-1}(core) and its
    remainder lies on that segment's growth face. Gather those remainders into
    one segment on the growth face of the block core x height.
    """
    n = A.dim
    edges = closed_edges(n - 1, core) + [height]
    j = decompose(n - 1, core).i
    block = _box(edges)
    boundary = frozenset(p for p in A.points if p[-1] < height) - block
    if any(p[j] != edges[j] for p in boundary):
        raise RearrangeInvariantError(f"{label}: boundary points leave the face x_{j + 1} = {edges[j]}.")

    current = PointSet(n, (A.points - boundary) | _face_segment(edges, j, len(boundary)))
    rec.record(label, current)
    return current


def step3_fold(A: PointSet, recorder: _Recorder | None = None) -> tuple[PointSet, str]:
    """
    Cut the part of every slab lying outside the strict interior of the bottom
    slab, reshape it as a segment of the hyperplane and put it back as a new
    slab. Returns the new set and one of folded, square (K == H now) or
    finished.

    With H == K - 1 the cut part fills less than the growth face of the block
    left behind, so it is laid on that face instead and the result is a
    segment up to relabelling.
    """
    n = A.dim
    sizes = _require_aligned(A, "step3")
    rec = _recorder_for(A, recorder)
    K, H = largest_edge(n - 1, sizes[0]), len(sizes)
    if K < H:
        raise PreconditionError(f"step3 needs K >= H, got K={K}, H={H}.")

    perm = find_relabelling(A)
    if perm is not None:
        return _relabel_exit(A, perm, rec), FINISHED
    if K == H:
        return A, SQUARE

    c = previous_closed(n - 1, sizes[0])
    top = sizes[-1]
    if top >= c:
        if H == K - 1:
            current = _reshape_boundary(A, c, H, "step3 first case: boundary as a face segment", rec)
            return _exit_by_relabelling(current, rec), FINISHED
        case = "first case"
        folded = [c] * H + [sum(s - c for s in sizes)]
    else:
        case = "second case"
        folded = [c] * (H - 1) + sorted([sum(s - c for s in sizes[:-1]), top], reverse=True)

    if max(folded[-2:]) > c:
        raise RearrangeInvariantError(f"step3 {case}: folded slab exceeds the strict interior ({folded}).")
    current = stack_set(n, folded)
    rec.record(f"step3 {case}: fold strict boundary into a new slab", current)
    return current, SQUARE if largest_edge(n - 1, c) == len(folded) else FOLDED


def step4_finalize(A: PointSet, recorder: _Recorder | None = None) -> PointSet:
    """
    Close a stack whose height equals its largest edge into I_n(|A|).

    The slabs' remainders outside the bottom interior are gathered on the
    growth face of the interior block. When the top slab does not hold the
    interior, the block is one level lower; its next face J2 is filled from
    the gathered points and the top slab, and the overflow J1 goes on top.
    """
    n = A.dim
    sizes = _require_aligned(A, "step4")
    rec = _recorder_for(A, recorder)
    K, H = largest_edge(n - 1, sizes[0]), len(sizes)
    if K != H:
        raise PreconditionError(f"step4 needs K == H, got K={K}, H={H}.")

    perm = find_relabelling(A)
    if perm is not None:
        return _relabel_exit(A, perm, rec)

    c0 = hull_sizes(n - 1, sizes[0]).interior
    top = sizes[-1]
    if top >= c0:
        current = _reshape_boundary(A, c0, H, "step4 first case: boundary as a face segment", rec)
        return _exit_by_relabelling(current, rec)

    current = _reshape_boundary(A, c0, H - 1, "step4 second case: boundary as a face segment", rec)
    edges = closed_edges(n - 1, c0) + [H - 1]
    j = decompose(n - 1, c0).i
    block = _box(edges)
    spare = len(current) - len(block)
    j2 = next_closed(n, len(block)) - len(block)
    if j2 >= spare:
        current = PointSet(n, block | _face_segment(edges, j, spare))
        rec.record("step4 second case: merge shortcut", current)
    else:
        closure = list(edges)
        closure[j] += 1
        j1 = spare - j2
        current = PointSet(n, _box(closure) | _face_segment(closure, n - 1, j1))
        rec.record(f"step4 second case: J2={j2}, J1={j1}", current)
    return _exit_by_relabelling(current, rec)


# =========================================================
# EXITS
# =========================================================
def find_relabelling(A: PointSet) -> tuple[int, ...] | None:
    """Lexicographically least axis permutation turning A into I_n(|A|), if any."""
    target = initial_segment(A.dim, len(A))
    for perm in axis_permutations(A.dim):
        if relabel(A, perm) == target:
            return perm
    return None


def _relabel_exit(A: PointSet, perm: tuple[int, ...], rec: _Recorder, label: str = "trivial exit") -> PointSet:
    current = relabel(A, perm)
    rec.record(f"{label}: relabel axes {list(perm)}", current)
    return current


def _exit_by_relabelling(A: PointSet, rec: _Recorder) -> PointSet:
    perm = find_relabelling(A)
    if perm is None:
        raise RearrangeInvariantError(f"Expected a relabelled I_{A.dim}({len(A)}) after the last move.")
    return _relabel_exit(A, perm, rec, label="exit")


def _normalize(A: PointSet, rec: _Recorder) -> PointSet:
    """Alternate step 2 and step 1 until step 2 merges nothing."""
    current = A
    while True:
        height = len(_require_stack(current))
        current = step2_align_interiors(current, rec)
        if len(_require_stack(current)) == height:
            return current
        current = step1_normalize(current, rec)




# =========================================================
# PIPELINE
# =========================================================
def rearrange_to_segment(A: PointSet) -> RearrangeTrace:
    """
    Move A into I_n(|A|) through steps that keep |A| and never raise sigma.

    Args:
        A: any finite point set; coordinates are compressed first.

    Returns:
        RearrangeTrace whose final set is exactly initial_segment(n, |A|).
    """
    n, m = A.dim, len(A)
    rec = _Recorder(A)
    target = initial_segment(n, m)

    current = compress(A)
    rec.record("compress", current)
    if current == target:
        return rec.finish(target)
    if n == 1 or m <= 1:
        rec.record("base case", target)
        return rec.finish(target)

    height = len({p[-1] for p in current.points})
    edge = max(lambda_profile(current).per_axis)
    bound = rec.sigma * (height + edge + 1)

    current = step1_normalize(current, rec)
    measure = None
    iterations = 0
    while current != target:
        iterations += 1
        if iterations > bound:
            raise RearrangeInvariantError(f"No convergence within {bound} iterations.")

        current = _normalize(current, rec)
        sizes = _require_stack(current)
        K, H = largest_edge(n - 1, sizes[0]), len(sizes)
        previous, measure = measure, (rec.sigma, K - H)
        if previous is not None and not measure < previous:
            raise RearrangeInvariantError(f"Termination measure did not decrease: {previous} -> {measure}.")

        if current == target:
            break
        perm = find_relabelling(current)
        if perm is not None:
            current = _relabel_exit(current, perm, rec)
            break
        if K > H:
            current, status = step3_fold(current, rec)
            if status == FINISHED:
                break
        elif K == H:
            current = step4_finalize(current, rec)
            break
        else:
            current = step1_normalize(current, rec)

    trace = rec.finish(target)
    logger.debug("rearranged %d points in %d steps, sigma %d -> %d",
                 m, len(trace.steps), trace.steps[0].sigma, trace.steps[-1].sigma)
    return trace
