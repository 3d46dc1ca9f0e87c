"""Hausdorff distance between finite samples of compact sets.

Conventions for the empty set: ``d(∅, ∅) = 0`` and ``d(∅, B) = 1`` for
non-empty ``B``.  Directed distances reduce with an inner ``min`` over the
second argument and an outer ``max`` over the first; both reductions are
exact in floating point, so any evaluation order (including the pruned
order of :func:`hausdorff_distance_fast`) returns the same bits.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import UsageError
from .metric import CoordinateSpace, EmbeddedEuclidean, FiniteSpace

Space = CoordinateSpace | FiniteSpace

# rows of the first argument per brute-force block
_BLOCK_ENTRIES = 1 << 22


class CompactSet:
    """A finite sample standing for a compact subset of ``ambient``.

    Duplicate points are dropped, keeping first occurrences in input order.
    ``resolution`` records how finely the sample resolves the underlying set
    and is not used by any computation.
    """

    __slots__ = ("ambient", "points", "resolution")

    def __init__(self, ambient: Space, points=(), resolution: float = 0.0):
        P = ambient.as_points(points)
        if len(P):
            if P.ndim == 1:
                _, first = np.unique(P, return_index=True)
            else:
                _, first = np.unique(P, axis=0, return_index=True)
            if len(first) != len(P):
                P = P[np.sort(first)]
        P.setflags(write=False)
        self.ambient = ambient
        self.points = P
        self.resolution = float(resolution)

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"CompactSet({len(self)} points in {self.ambient!r})"

    @property
    def empty(self) -> bool:
        return len(self.points) == 0

    def subset(self, mask_or_index) -> "CompactSet":
        return CompactSet(self.ambient, self.points[mask_or_index], self.resolution)


def _check_ambient(A: CompactSet, B: CompactSet) -> None:
    if not A.ambient.compatible(B.ambient):
        raise UsageError("compact sets live in different ambient spaces")


def _directed(A: CompactSet, B: CompactSet) -> float:
    if A.empty:
        return 0.0
    if B.empty:
        return 1.0
    space = A.ambient
    step = max(1, _BLOCK_ENTRIES // len(B))
    best = 0.0
    for lo in range(0, len(A), step):
        block = space.pairwise(A.points[lo : lo + step], B.points)
        best = max(best, float(block.min(axis=1).max()))
    return best


def directed_hausdorff(A: CompactSet, B: CompactSet) -> float:
    """``sup_{a in A} inf_{b in B} d(a, b)`` by exhaustive evaluation."""
    _check_ambient(A, B)
    return _directed(A, B)


def hausdorff_distance(A: CompactSet, B: CompactSet) -> float:
    """Symmetric Hausdorff distance; the brute-force reference kernel."""
    _check_ambient(A, B)
    if A.empty and B.empty:
        return 0.0
    return max(_directed(A, B), _directed(B, A))


def product_metric(p: tuple[CompactSet, object], q: tuple[CompactSet, object]) -> float:
    """``max(d_H(Z, Z'), d(x, x'))`` on pairs (compact set, point)."""
    (Z, x), (Z2, x2) = p, q
    _check_ambient(Z, Z2)
    return max(hausdorff_distance(Z, Z2), Z.ambient.distance(x, x2))


def epsilon_net(S: CompactSet, eps: float) -> CompactSet:
    """Greedy ``eps``-net of ``S`` scanning points in their stored order.

    Every point of ``S`` ends up within ``eps`` of the net and net members are
    pairwise more than ``eps`` apart.
    """
    if eps <= 0:
        raise UsageError("eps must be positive")
    if S.empty:
        return S
    space = S.ambient
    gap = np.full(len(S), np.inf)
    chosen: list[int] = []
    while True:
        open_ = np.flatnonzero(gap > eps)
        if not len(open_):
            break
        i = int(open_[0])
        chosen.append(i)
        gap = np.minimum(gap, space.pairwise(S.points, S.points[i : i + 1])[:, 0])
    return S.subset(np.array(chosen))


class SpatialIndex:
    """Nearest-distance structure over the members of a compact set.

    For metrics of the form ``min(1, |f(p) - f(q)|)`` a k-d tree over the
    embedded points yields approximate distances with a known error bound;
    :func:`hausdorff_distance_fast` uses them only to order and prune work and
    always recomputes surviving candidates with the exact kernel.  Other
    ambients fall back to exhaustive scans.
    """

    # relative bound on |tree distance - kernel distance| before cut-off
    SLACK = 1e-9

    def __init__(self, S: CompactSet):
        self.target = S
        self.size = len(S)
        self.tree = None
        self.embedded = None
        space = S.ambient
        if (
            isinstance(space, CoordinateSpace)
            and isinstance(space.metric, EmbeddedEuclidean)
            and self.size
        ):
            self.embedded = space.metric.embed(S.points)
            self.tree = cKDTree(self.embedded)

    def check(self, S: CompactSet) -> None:
        if len(S) != self.size or not S.ambient.compatible(self.target.ambient):
            raise UsageError("spatial index is stale: it was built over a different set")

    def nearest_distance(self, Q: np.ndarray) -> np.ndarray:
        """Exact ``min_b d(q, b)`` for each query row; equal to brute force."""
        Q = self.target.ambient.as_points(Q)
        if self.size == 0:
            return np.full(len(Q), np.inf)
        if self.tree is None:
            return self.target.ambient.pairwise(Q, self.target.points).min(axis=1)
        EQ = self.target.ambient.metric.embed(Q)
        approx, _ = self.tree.query(EQ)
        return self._refine(EQ, approx)

    def _refine(self, EQ: np.ndarray, approx: np.ndarray) -> np.ndarray:
        metric = self.target.ambient.metric
        radius = approx * (1.0 + 4 * self.SLACK) + 4 * self.SLACK
        out = np.empty(len(EQ))
        for i, cand in enumerate(self.tree.query_ball_point(EQ, radius)):
            out[i] = metric.pairwise_embedded(EQ[i : i + 1], self.embedded[cand]).min()
        return out

    def directed_from(self, A: CompactSet) -> float:
        """``sup_{a in A} min_b d(a, b)`` with early termination."""
        if A.empty:
            return 0.0
        if self.size == 0:
            return 1.0
        if self.tree is None:
            return _directed(A, self.target)
        EA = self.target.ambient.metric.embed(A.points)
        approx, _ = self.tree.query(EA)
        upper = np.minimum(approx * (1.0 + self.SLACK) + self.SLACK, 1.0)
        order = np.argsort(-approx, kind="stable")
        best = -np.inf
        step = 256
        for lo in range(0, len(order), step):
            rows = order[lo : lo + step]
            live = rows[upper[rows] > best]
            if not len(live):
                # sorted by approx: every remaining row is dominated as well
                break
            exact = self._refine(EA[live], approx[live])
            best = max(best, float(exact.max()))
        return float(best)


def hausdorff_distance_fast(
    A: CompactSet,
    B: CompactSet,
    idx_a: SpatialIndex | None = None,
    idx_b: SpatialIndex | None = None,
) -> float:
    """Accelerated Hausdorff distance, bitwise equal to :func:`hausdorff_distance`."""
    _check_ambient(A, B)
    idx_a = idx_a or SpatialIndex(A)
    idx_b = idx_b or SpatialIndex(B)
    idx_a.check(A)
    idx_b.check(B)
    if A.empty and B.empty:
        return 0.0
    return max(idx_b.directed_from(A), idx_a.directed_from(B))


@dataclass
class Benchmark:
    n_a: int
    n_b: int
    brute_seconds: float
    fast_seconds: float
    value: float
    equal: bool

    @property
    def speedup(self) -> float:
        return self.brute_seconds / self.fast_seconds if self.fast_seconds > 0 else float("inf")


def benchmark(A: CompactSet, B: CompactSet) -> Benchmark:
    """Time both kernels on one pair and confirm they agree bitwise."""
    from time import perf_counter

    t0 = perf_counter()
    slow = hausdorff_distance(A, B)
    t1 = perf_counter()
    fast = hausdorff_distance_fast(A, B)
    t2 = perf_counter()
    return Benchmark(len(A), len(B), t1 - t0, t2 - t1, slow, slow == fast)
