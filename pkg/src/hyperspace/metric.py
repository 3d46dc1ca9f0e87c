"""Ambient metric spaces with distances bounded by 1.

Two kinds of ambient space are supported:

* :class:`CoordinateSpace` -- points are rows of a float array of fixed
  dimension and distances come from a :class:`BoundedMetric`.
* :class:`FiniteSpace` -- points are integer indices into a precomputed
  distance matrix.  Coordinates may be attached for plotting and for
  snapping coordinate-valued group actions.

Both expose ``pairwise(P, Q)`` returning the matrix of distances, which is
the single entry point used by every Hausdorff computation.  Kernels are
elementwise numpy expressions so that the value of ``d(p, q)`` does not
depend on the shape of the batch it was computed in.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import UsageError
from .report import Finding


def _euclid_cut(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    # explicit per-coordinate accumulation: no pairwise-summation reordering
    acc = np.zeros((P.shape[0], Q.shape[0]))
    for k in range(P.shape[1]):
        diff = P[:, k, None] - Q[None, :, k]
        acc += diff * diff
    return np.minimum(np.sqrt(acc), 1.0)


class BoundedMetric:
    """Distance oracle with values in [0, 1] on points of ``R^dim``."""

    name = "metric"

    def pairwise(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, p, q) -> float:
        P = np.atleast_2d(np.asarray(p, dtype=float))
        Q = np.atleast_2d(np.asarray(q, dtype=float))
        return float(self.pairwise(P, Q)[0, 0])


class EmbeddedEuclidean(BoundedMetric):
    """``min(1, |f(p) - f(q)|)`` for a feature map ``f`` applied row-wise.

    With ``f`` the identity this is the cut-off Euclidean metric.  Spatial
    indices use :meth:`embed` to run nearest-neighbour queries in feature
    space; cutting off at 1 is monotone so nearest neighbours agree.
    """

    def __init__(self, embed: Callable[[np.ndarray], np.ndarray] | None = None, name: str = "euclid-cutoff"):
        self._embed = embed
        self.name = name

    def embed(self, P: np.ndarray) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        return P if self._embed is None else self._embed(P)

    def pairwise(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        return _euclid_cut(self.embed(P), self.embed(Q))

    def pairwise_embedded(self, EP: np.ndarray, EQ: np.ndarray) -> np.ndarray:
        return _euclid_cut(EP, EQ)


class CutoffMetric(BoundedMetric):
    """``min(d, 1)`` for an arbitrary scalar metric oracle ``d``."""

    def __init__(self, d: Callable[[np.ndarray, np.ndarray], float], name: str = "cutoff"):
        self.d = d
        self.name = name

    def pairwise(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        out = np.empty((len(P), len(Q)))
        for i, p in enumerate(P):
            for j, q in enumerate(Q):
                out[i, j] = self.d(p, q)
        return np.minimum(out, 1.0)


def cutoff(d: Callable[[np.ndarray, np.ndarray], float], name: str = "cutoff") -> BoundedMetric:
    """Bound a metric by 1.  The caller vouches that ``d`` is a metric."""
    return CutoffMetric(d, name=name)


def euclidean_cutoff() -> EmbeddedEuclidean:
    return EmbeddedEuclidean(None, name="euclid-cutoff")


def _norm_rows(P: np.ndarray) -> np.ndarray:
    acc = np.zeros(P.shape[0])
    for k in range(P.shape[1]):
        acc += P[:, k] * P[:, k]
    return np.sqrt(acc)


def to_disk(P: np.ndarray) -> np.ndarray:
    """The homeomorphism ``p -> p / (1 + |p|)`` onto the open unit ball."""
    P = np.asarray(P, dtype=float)
    return P / (1.0 + _norm_rows(P))[:, None]


def disk_pullback_metric() -> EmbeddedEuclidean:
    """Cut-off Euclidean metric of the unit disk pulled back along :func:`to_disk`."""
    return EmbeddedEuclidean(to_disk, name="disk-pullback")


METRICS: dict[str, Callable[[], BoundedMetric]] = {
    "euclid-cutoff": euclidean_cutoff,
    "disk-pullback": disk_pullback_metric,
}


class CoordinateSpace:
    """``R^dim`` (or a subset of it) with a bounded metric."""

    def __init__(self, metric: BoundedMetric, dim: int):
        if dim < 1:
            raise UsageError("dimension must be at least 1")
        self.metric = metric
        self.dim = int(dim)

    def __repr__(self) -> str:
        return f"CoordinateSpace({self.metric.name}, dim={self.dim})"

    def compatible(self, other: object) -> bool:
        if other is self:
            return True
        if not isinstance(other, CoordinateSpace) or other.dim != self.dim:
            return False
        # built-in metrics are interchangeable by name; anything else by identity
        return other.metric is self.metric or (
            self.metric.name in METRICS and other.metric.name == self.metric.name
        )

    def as_points(self, points) -> np.ndarray:
        P = np.asarray(points, dtype=float)
        if P.size == 0:
            return np.zeros((0, self.dim))
        if P.ndim == 1 and self.dim == 1:
            P = P[:, None]
        if P.ndim != 2 or P.shape[1] != self.dim:
            raise UsageError(f"expected points of dimension {self.dim}, got shape {P.shape}")
        return P

    def pairwise(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        return self.metric.pairwise(P, Q)

    def distance(self, p, q) -> float:
        return float(self.pairwise(self.as_points([p]), self.as_points([q]))[0, 0])


class FiniteSpace:
    """A finite metric space given by its distance matrix.

    Points are the integers ``0..n-1``.  The constructor only checks shape;
    use :func:`verify_metric_axioms` to validate an untrusted matrix.
    """

    def __init__(self, dist, labels: Sequence[str] | None = None, coords=None):
        D = np.array(dist, dtype=float)
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise UsageError(f"distance matrix must be square, got shape {D.shape}")
        if not np.all(np.isfinite(D)):
            raise UsageError("distance matrix has non-finite entries")
        D.setflags(write=False)
        self.dist = D
        self.n = D.shape[0]
        if labels is not None and len(labels) != self.n:
            raise UsageError("labels must match the number of points")
        self.labels = list(labels) if labels is not None else None
        if coords is not None:
            coords = np.array(coords, dtype=float)
            if coords.ndim == 1:
                coords = coords[:, None]
            if coords.shape[0] != self.n:
                raise UsageError("coords must match the number of points")
            coords.setflags(write=False)
        self.coords = coords

    def __repr__(self) -> str:
        return f"FiniteSpace(n={self.n})"

    def __len__(self) -> int:
        return self.n

    @classmethod
    def from_points(cls, points, metric: BoundedMetric | None = None, labels=None) -> "FiniteSpace":
        metric = metric or euclidean_cutoff()
        P = np.asarray(points, dtype=float)
        if P.ndim == 1:
            P = P[:, None]
        D = metric.pairwise(P, P)
        np.fill_diagonal(D, 0.0)
        return cls(D, labels=labels, coords=P)

    def compatible(self, other: object) -> bool:
        if other is self:
            return True
        return isinstance(other, FiniteSpace) and other.n == self.n and np.array_equal(other.dist, self.dist)

    def as_points(self, points) -> np.ndarray:
        idx = np.asarray(points, dtype=np.int64).reshape(-1)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise UsageError(f"point index out of range for a space of {self.n} points")
        return idx

    def pairwise(self, I: np.ndarray, J: np.ndarray) -> np.ndarray:
        return self.dist[np.ix_(I, J)]

    def distance(self, i: int, j: int) -> float:
        return float(self.dist[i, j])


def verify_metric_axioms(space: FiniteSpace, tol: float = 1e-12) -> list[Finding]:
    """Check every metric axiom on every pair and triple of ``space``.

    Returns the violations found; an empty list means the matrix is a metric
    bounded by 1 up to ``tol``.
    """
    if tol < 0:
        raise UsageError("tol must be non-negative")
    D = space.dist
    n = space.n
    out: list[Finding] = []
    for i in np.flatnonzero(np.abs(np.diag(D)) > tol):
        out.append(Finding("zero-diagonal", (int(i),), float(abs(D[i, i]))))
    asym = np.abs(D - D.T)
    for i, j in zip(*np.nonzero(np.triu(asym > tol, 1))):
        out.append(Finding("symmetry", (int(i), int(j)), float(asym[i, j])))
    off = ~np.eye(n, dtype=bool)
    for i, j in zip(*np.nonzero(np.triu(off & (D <= tol), 1))):
        out.append(Finding("separation", (int(i), int(j)), float(D[i, j])))
    for i, j in zip(*np.nonzero(np.triu((D < -tol) | (D > 1 + tol)))):
        out.append(Finding("range", (int(i), int(j)), float(D[i, j])))
    for k in range(n):
        # d(i,j) <= d(i,k) + d(k,j)
        excess = D - (D[:, k, None] + D[None, k, :])
        for i, j in zip(*np.nonzero(excess > tol)):
            out.append(Finding("triangle", (int(i), int(k), int(j)), float(excess[i, j])))
    return out
