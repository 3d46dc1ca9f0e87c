"""Finite models of the hyperspace of compact subsets.

Over a finite ambient space every subset is compact, so the hyperspace is
the power set with the Hausdorff metric.  Subsets are encoded as bitmasks
(bit ``i`` set iff point ``i`` belongs to the subset), which lets the
verifiers below run exhaustively with array operations.

Balls are open (``d < eps``) everywhere in this module.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CapacityError, UsageError
from .hausdorff import CompactSet, hausdorff_distance
from .metric import FiniteSpace
from .report import Finding

MAX_POINTS = 16
# the 4^n distance matrix is materialised only up to this size
MAX_DMAT_POINTS = 12


def _bits(mask: int, n: int) -> list[int]:
    return [i for i in range(n) if mask >> i & 1]


class HSpaceEnum:
    """All ``2^n`` subsets of a finite space with their Hausdorff distances.

    Element ``m`` is the subset whose bitmask is ``m``; element 0 is the empty
    set.  ``dmat`` is computed on first access by a subset dynamic programme
    and agrees bitwise with :func:`hausdorff_distance` on every pair.
    """

    def __init__(self, ambient: FiniteSpace):
        self.ambient = ambient
        self.n = ambient.n
        self.size = 1 << self.n
        masks = np.arange(self.size, dtype=np.int64)
        self.masks = masks
        # membership[m, i] is True iff point i belongs to subset m
        self.membership = (masks[:, None] >> np.arange(self.n)[None, :]) & 1 == 1

    def element(self, mask: int) -> CompactSet:
        return CompactSet(self.ambient, _bits(mask, self.n))

    @property
    def elements(self) -> list[CompactSet]:
        return [self.element(m) for m in range(self.size)]

    @cached_property
    def dmat(self) -> np.ndarray:
        if self.n > MAX_DMAT_POINTS:
            raise CapacityError(f"a {self.size}x{self.size} distance matrix is too large")
        n, size = self.n, self.size
        D = self.ambient.dist
        # near[m, a] = min over b in subset m of d(a, b); +inf for the empty set
        near = np.full((size, n), np.inf)
        for m in range(1, size):
            low = (m & -m).bit_length() - 1
            near[m] = np.minimum(near[m & (m - 1)], D[:, low])
        # far[a_mask, b_mask] = max over a in a_mask of near[b_mask, a]
        far = np.zeros((size, size))
        for m in range(1, size):
            low = (m & -m).bit_length() - 1
            far[m] = np.maximum(far[m & (m - 1)], near[:, low])
        H = np.maximum(far, far.T)
        H[0, :] = 1.0
        H[:, 0] = 1.0
        H[0, 0] = 0.0
        H.setflags(write=False)
        return H

    def ball(self, mask: int, eps: float) -> np.ndarray:
        """Boolean mask over elements: the open ``d_H`` ball around ``mask``."""
        return self.dmat[mask] < eps


def enumerate_h(space: FiniteSpace) -> HSpaceEnum:
    if space.n > MAX_POINTS:
        raise CapacityError(f"refusing to enumerate 2^{space.n} subsets (limit n <= {MAX_POINTS})")
    return HSpaceEnum(space)


@dataclass(frozen=True)
class UniversalFamily:
    """The incidence pairs ``(Z, x)`` with ``x in Z`` over an enumeration."""

    h: HSpaceEnum
    pairs: tuple[tuple[int, int], ...]

    @classmethod
    def over(cls, h: HSpaceEnum) -> "UniversalFamily":
        z, x = np.nonzero(h.membership)
        return cls(h, tuple(zip(z.tolist(), x.tolist())))

    def __contains__(self, pair) -> bool:
        z, x = pair
        return bool(self.h.membership[z, x])


def verify_z_closed(h: HSpaceEnum, u: UniversalFamily) -> list[Finding]:
    """Every pair off the incidence set has a product ball missing it.

    For ``x not in Z`` the witness radius is half the distance from ``x`` to
    ``Z`` (1 when ``Z`` is empty); the check is that no ``(Z', x')`` with
    ``x' in Z'`` lies in the ``rho``-ball of half that radius.
    """
    if u.h is not h:
        raise UsageError("universal family was built over a different enumeration")
    D = h.ambient.dist
    dmat = h.dmat
    out: list[Finding] = []
    for z in range(h.size):
        members = h.membership[z]
        for x in np.flatnonzero(~members):
            eps = 1.0 if not members.any() else 0.5 * float(D[x, members].min())
            if eps <= 0:
                out.append(Finding("z-closed", (z, int(x)), 0.0, detail={"reason": "x at distance 0 from Z"}))
                continue
            near_x = D[x] < eps / 2
            near_z = dmat[z] < eps / 2
            hit = near_z & (h.membership[:, near_x].any(axis=1))
            if hit.any():
                z2 = int(np.flatnonzero(hit)[0])
                out.append(Finding("z-closed", (z, int(x)), eps, detail={"intruder": z2}))
    return out


def verify_pi1_open(h: HSpaceEnum, u: UniversalFamily, eps_list) -> list[Finding]:
    """Check ``pi_1(Zcal ∩ B((Z,x), eps)) == B(Z, eps)`` for all pairs and radii."""
    if u.h is not h:
        raise UsageError("universal family was built over a different enumeration")
    D = h.ambient.dist
    dmat = h.dmat
    out: list[Finding] = []
    for eps in eps_list:
        if not 0 < eps <= 1:
            raise UsageError("eps values must lie in (0, 1]")
        for z, x in u.pairs:
            ball = dmat[z] < eps
            image = ball & h.membership[:, D[x] < eps].any(axis=1)
            if not np.array_equal(image, ball):
                diff = np.flatnonzero(image != ball)
                out.append(Finding("pi1-open", (z, x, float(eps)), float(len(diff)),
                                   detail={"differing": diff[:8]}))
    return out


@dataclass
class SequentialFamily:
    """Compact sets ``Z_1..Z_N`` together with the value ``Z_inf`` at infinity."""

    terms: list[CompactSet]
    limit: CompactSet

    def __post_init__(self):
        for t in self.terms:
            if not t.ambient.compatible(self.limit.ambient):
                raise UsageError("all members of a sequential family must share one ambient space")

    @property
    def N(self) -> int:
        return len(self.terms)

    def distances(self) -> np.ndarray:
        return np.array([hausdorff_distance(t, self.limit) for t in self.terms])


@dataclass
class ProperResult:
    status: str  # "ok", "hypothesis-failed" or "conclusion-failed"
    point: object = None
    count: int = 0
    tail: int = 0
    residual: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def verify_pi1_proper(f: SequentialFamily, picks, tol: float, min_fraction: float = 0.5) -> ProperResult:
    """Find an accumulation point in ``Z_inf`` of points picked from ``Z_n``.

    The hypothesis (``Z_n -> Z_inf``) is read off the truncated sequence: every
    term in the second half must be within ``tol`` of the limit.  The
    conclusion asks for ``x in Z_inf`` with at least ``min_fraction`` of the
    tail picks within ``tol`` of it.
    """
    if tol <= 0:
        raise UsageError("tol must be positive")
    if len(picks) != f.N:
        raise UsageError("need one pick per term")
    if any(t.empty for t in f.terms) or f.limit.empty:
        raise UsageError("terms and limit must be non-empty")
    space = f.limit.ambient
    P = space.as_points(list(picks))
    for n, t in enumerate(f.terms):
        if space.pairwise(P[n : n + 1], t.points).min() != 0.0:
            raise UsageError(f"pick {n + 1} does not belong to its term")
    start = f.N // 2
    dists = f.distances()
    tail_dist = float(dists[start:].max()) if f.N else 0.0
    if tail_dist >= tol:
        return ProperResult("hypothesis-failed", tail=f.N - start, residual=tail_dist)
    tail = P[start:]
    close = space.pairwise(f.limit.points, tail) < tol
    counts = close.sum(axis=1)
    best = int(np.argmax(counts))
    need = int(np.ceil(min_fraction * len(tail)))
    point = f.limit.points[best]
    status = "ok" if counts[best] >= need else "conclusion-failed"
    return ProperResult(status, point=point, count=int(counts[best]), tail=len(tail), residual=tail_dist)


def covering_conditions(Zn: CompactSet, Zinf: CompactSet, eps: float) -> tuple[bool, bool]:
    """The two ball-covering conditions at one index.

    First: ``Z_n`` inside the union of ``eps``-balls around ``Z_inf``.
    Second: ``Z_inf`` inside the union of ``eps``-balls around ``Z_n``.
    """
    space = Zinf.ambient
    if Zn.empty or Zinf.empty:
        return Zn.empty, Zinf.empty
    D = space.pairwise(Zn.points, Zinf.points)
    return bool((D.min(axis=1) < eps).all()), bool((D.min(axis=0) < eps).all())


@dataclass
class ContinuityResult:
    eps: float
    index: int | None  # least N (1-based) such that both conditions hold for all n >= N
    residual: float  # max d_H over terms where a condition fails
    mismatches: list[Finding] = field(default_factory=list)
    conditions: list[tuple[bool, bool]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.index is not None and not self.mismatches


def verify_family_continuity(f: SequentialFamily, eps: float) -> ContinuityResult:
    """Least index past which both covering conditions hold, on the truncated tail.

    Also records every index at which the conditions disagree with the
    test ``d_H(Z_n, Z_inf) < eps``; on finite sets they never should.
    """
    if not 0 < eps <= 1:
        raise UsageError("eps must lie in (0, 1]")
    conds = [covering_conditions(t, f.limit, eps) for t in f.terms]
    dists = f.distances()
    mismatches = []
    for n, ((c1, c2), d) in enumerate(zip(conds, dists), start=1):
        if (c1 and c2) != (d < eps):
            mismatches.append(Finding("continuity-equivalence", n, float(d), detail={"cond1": c1, "cond2": c2}))
    index = None
    for n in range(f.N, 0, -1):
        if not all(conds[n - 1]):
            break
        index = n
    failing = [d for (c1, c2), d in zip(conds, dists) if not (c1 and c2)]
    residual = float(max(failing)) if failing else 0.0
    return ContinuityResult(eps, index, residual, mismatches, conds)


def verify_compactness_net(h: HSpaceEnum, eps: float, net: CompactSet) -> list[Finding]:
    """Non-empty subsets of an ``eps``-net form an ``eps``-net of the hyperspace."""
    if not net.ambient.compatible(h.ambient):
        raise UsageError("net lives in a different ambient space")
    D = h.ambient.dist
    net_idx = np.asarray(net.points, dtype=np.int64)
    out: list[Finding] = []
    if h.n and (net.empty or D[:, net_idx].min(axis=1).max() > eps):
        out.append(Finding("net-precondition", net_idx, float(D[:, net_idx].min(axis=1).max()) if len(net_idx) else 1.0))
        return out
    net_mask = int(sum(1 << int(i) for i in net_idx))
    sub = [m for m in range(1, h.size) if m & ~net_mask == 0]
    gaps = h.dmat[:, sub].min(axis=1) if sub else np.ones(h.size)
    for z in range(1, h.size):
        if gaps[z] > eps:
            out.append(Finding("compactness-net", z, float(gaps[z])))
    return out


# ---------------------------------------------------------------- generators


def random_finite_space(rng: np.random.Generator, n: int, kind: str | None = None) -> FiniteSpace:
    """Random metric on ``n`` points: planar samples or a graph path metric."""
    from scipy.sparse.csgraph import shortest_path

    from .metric import euclidean_cutoff

    kind = kind or ("cloud" if rng.random() < 0.5 else "graph")
    if kind == "cloud":
        scale = rng.choice([0.5, 1.0, 2.0])
        return FiniteSpace.from_points(rng.random((n, 2)) * scale, euclidean_cutoff())
    if kind == "graph":
        W = rng.uniform(0.05, 0.9, size=(n, n))
        W = np.triu(W, 1)
        W = W + W.T
        D = shortest_path(W, method="FW", directed=False)
        D = np.minimum(D, 1.0)
        np.fill_diagonal(D, 0.0)
        return FiniteSpace(D)
    if kind == "uniform":
        D = np.full((n, n), 0.5)
        np.fill_diagonal(D, 0.0)
        return FiniteSpace(D)
    raise UsageError(f"unknown space kind {kind!r}")


def random_family(rng: np.random.Generator, h: HSpaceEnum, N: int) -> SequentialFamily:
    """Random subsets as terms and limit, some drifting towards the limit."""
    limit = int(rng.integers(0, h.size))
    terms = []
    for _ in range(N):
        if rng.random() < 0.4:
            m = limit ^ (1 << int(rng.integers(0, h.n))) if h.n else 0
        else:
            m = int(rng.integers(0, h.size))
        terms.append(h.element(m))
    return SequentialFamily(terms, h.element(limit))


def line_family(N: int, extra_zero: bool = True) -> SequentialFamily:
    """``Z_n = {0, 1/n}`` (or ``{1/n}``) converging to ``{0}`` in ``[0, 1]``."""
    from .metric import CoordinateSpace, euclidean_cutoff

    space = CoordinateSpace(euclidean_cutoff(), 1)
    terms = [CompactSet(space, [0.0, 1.0 / n] if extra_zero else [1.0 / n]) for n in range(1, N + 1)]
    return SequentialFamily(terms, CompactSet(space, [0.0]))


def collision_families(N: int) -> tuple[SequentialFamily, SequentialFamily]:
    """Two and three points colliding at the origin of ``[-1, 1]``."""
    from .metric import CoordinateSpace, euclidean_cutoff

    space = CoordinateSpace(euclidean_cutoff(), 1)
    limit = CompactSet(space, [0.0])
    pairs = [CompactSet(space, [-1.0 / n, 1.0 / n]) for n in range(1, N + 1)]
    triples = [CompactSet(space, [-1.0 / n, 0.0, 1.0 / n]) for n in range(1, N + 1)]
    return SequentialFamily(pairs, limit), SequentialFamily(triples, limit)
