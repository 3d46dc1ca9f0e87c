"""Orbit closures and approximate Hausdorff quotients of group actions.

A group is given by finitely many generator self-maps of the ambient space.
Orbit closures are computed by breadth-first application of the generators.
Exploration and output are kept apart: exploration remembers every visited
point on a grid ``fine`` times finer than ``eps`` (so orbits that creep
slowly away from a fixed point are still followed), while the returned
sample only keeps points at least ``eps / 2`` from the ones already kept.
Every visited point is therefore within ``eps / 2`` of the sample.

Continuous groups are modelled by a few time steps whose logarithms (or
times) are rationally independent, e.g. scaling by 2 and by 3 for the
positive reals, so the generated subgroup is dense and the computed
closure matches the closure of the continuous orbit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ActionError, DegenerateQuotientError, UsageError
from .hausdorff import CompactSet, hausdorff_distance
from .metric import CoordinateSpace, FiniteSpace

Space = CoordinateSpace | FiniteSpace


@dataclass(frozen=True)
class GroupAction:
    """Generators acting on point arrays of ``space``.

    Each generator maps an array of points (indices for a finite space,
    coordinate rows otherwise) to an array of the same shape.
    """

    space: Space
    generators: tuple[Callable[[np.ndarray], np.ndarray], ...]
    labels: tuple[str, ...]
    # memoised orbit closures keyed by (point, eps, budget, fine)
    cache: dict = field(default_factory=dict, compare=False, repr=False)

    def apply(self, g: int, P: np.ndarray) -> np.ndarray:
        out = np.asarray(self.generators[g](P))
        if out.shape != P.shape:
            raise ActionError(f"generator {self.labels[g]!r} changed the shape of its input")
        if isinstance(self.space, FiniteSpace):
            if out.dtype.kind not in "iu" or (out.size and (out.min() < 0 or out.max() >= self.space.n)):
                raise ActionError(f"generator {self.labels[g]!r} left the finite space")
        elif not np.all(np.isfinite(out)):
            raise ActionError(f"generator {self.labels[g]!r} produced a non-finite point")
        return out


def identity_action(space: Space) -> GroupAction:
    return GroupAction(space, (lambda P: P.copy(),), ("id",))


def permutation_action(space: FiniteSpace, tables: Sequence[Sequence[int]], labels=None) -> GroupAction:
    gens = []
    for t in tables:
        t = np.asarray(t, dtype=np.int64)
        if t.shape != (space.n,) or sorted(t.tolist()) != list(range(space.n)):
            raise UsageError("permutation table must be a permutation of the point indices")
        gens.append(lambda P, t=t: t[P])
    labels = tuple(labels or (f"perm{i}" for i in range(len(gens))))
    return GroupAction(space, tuple(gens), labels)


def coordinate_action(space: Space, maps: Sequence[Callable], labels=None, snap: float = 1e-9) -> GroupAction:
    """Coordinate formulas as generators.

    On a coordinate space images are kept exactly.  On a finite space with
    attached coordinates each image is snapped to the sample within ``snap``
    of it, and a miss is an :class:`ActionError`.
    """
    labels = tuple(labels or (f"map{i}" for i in range(len(maps))))
    if isinstance(space, CoordinateSpace):
        return GroupAction(space, tuple(maps), labels)
    if space.coords is None:
        raise UsageError("coordinate formulas need a finite space with coordinates")
    from scipy.spatial import cKDTree

    tree = cKDTree(space.coords)

    def snapped(fn, label):
        def g(I):
            dist, j = tree.query(fn(space.coords[I]))
            if np.any(dist > snap):
                raise ActionError(f"generator {label!r} lands {float(np.max(dist)):.3g} away from every sample")
            return j.astype(np.int64)

        return g

    return GroupAction(space, tuple(snapped(f, l) for f, l in zip(maps, labels)), labels)


# ------------------------------------------------------------ built-in maps


def rotation(k: int, n: int) -> Callable[[np.ndarray], np.ndarray]:
    """Rotation of the plane about the origin by ``2 pi k / n``."""
    c, s = math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)
    return lambda P: np.stack([c * P[:, 0] - s * P[:, 1], s * P[:, 0] + c * P[:, 1]], axis=1)


def halfline_scale(c: float) -> Callable[[np.ndarray], np.ndarray]:
    """Multiplication by ``c`` on ``[0, inf]`` read through ``t -> t / (1 + t)``."""
    if c <= 0:
        raise UsageError("scale factor must be positive")
    return lambda S: c * S / (1.0 + (c - 1.0) * S)


def circle_height_flow(dt: float, radius: float = 1.0, const: bool = False) -> Callable[[np.ndarray], np.ndarray]:
    """Time-``dt`` gradient flow of the height ``y`` on the circle of ``radius``.

    Writing ``phi`` for the angle from the top, the flow is
    ``tan(phi/2) -> tan(phi/2) * exp(-dt)``; top and bottom are fixed.
    """
    if const:
        return lambda P: P.copy()
    shrink = math.exp(-dt)

    def flow(P):
        phi = np.arctan2(P[:, 0], P[:, 1])
        phi = 2.0 * np.arctan2(np.sin(phi / 2) * shrink, np.cos(phi / 2))
        return np.stack([radius * np.sin(phi), radius * np.cos(phi)], axis=1)

    return flow


# ---------------------------------------------------------------- orbits


@dataclass
class OrbitClosure:
    base: np.ndarray
    points: CompactSet
    saturated: bool
    explored: int = 0


def _cell_keys(space: Space, P: np.ndarray, cell: float) -> list:
    if isinstance(space, FiniteSpace):
        return P.tolist()
    return [tuple(row) for row in np.round(P / cell).astype(np.int64).tolist()]


def orbit_closure(x, action: GroupAction, eps: float, budget: int = 100_000, fine: int = 8) -> OrbitClosure:
    """Breadth-first orbit of ``x`` sampled at resolution ``eps``.

    ``budget`` caps the number of visited points; hitting it leaves the
    closure unsaturated rather than raising.
    """
    if eps <= 0:
        raise UsageError("eps must be positive")
    if budget < 1:
        raise UsageError("budget must be at least 1")
    space = action.space
    base = space.as_points([x])
    key = (base.tobytes(), float(eps), int(budget), int(fine))
    if key in action.cache:
        return action.cache[key]
    cell = eps / fine
    seen = set(_cell_keys(space, base, cell))
    kept = base
    frontier = base
    truncated = False
    while len(frontier) and not truncated:
        img = np.concatenate([action.apply(g, frontier) for g in range(len(action.generators))])
        fresh = []
        for i, k in enumerate(_cell_keys(space, img, cell)):
            if k in seen:
                continue
            if len(seen) >= budget:
                truncated = True
                break
            seen.add(k)
            fresh.append(i)
        frontier = img[fresh]
        if not len(frontier):
            break
        gap = space.pairwise(frontier, kept).min(axis=1)
        accepted: list[int] = []
        for i in np.flatnonzero(gap >= eps / 2):
            if accepted and space.pairwise(frontier[i : i + 1], frontier[accepted]).min() < eps / 2:
                continue
            accepted.append(int(i))
        if accepted:
            kept = np.concatenate([kept, frontier[accepted]])
    result = OrbitClosure(base[0], CompactSet(space, kept, resolution=eps), saturated=not truncated,
                          explored=len(seen))
    action.cache[key] = result
    return result



def e_image(samples, action: GroupAction, eps: float, budget: int = 100_000) -> list[tuple[np.ndarray, OrbitClosure]]:
    """Orbit closure of every sample, in input order."""
    P = _sample_points(samples, action.space)
    out = []
    for i in range(len(P)):
        try:
            out.append((P[i], orbit_closure(P[i], action, eps, budget)))
        except ActionError as exc:
            raise ActionError(f"sample {i} ({P[i].tolist()}): {exc}") from exc
    return out


def _sample_points(samples, space: Space) -> np.ndarray:
    if isinstance(samples, CompactSet):
        if not samples.ambient.compatible(space):
            raise UsageError("samples live in a different space than the action")
        return samples.points
    return space.as_points(samples)


@dataclass(frozen=True)
class Witness:
    """Two samples closer than ``delta`` whose orbit closures are far apart."""

    i: int
    j: int
    distance: float
    hausdorff: float

    def to_dict(self) -> dict:
        return {"i": self.i, "j": self.j, "distance": self.distance, "hausdorff": self.hausdorff}


def stability_probe(samples, action: GroupAction, eps: float, budget: int, delta: float,
                    factor: float = 10.0, images=None) -> list[Witness]:
    """Sampled discontinuities of ``x -> closure(G x)``.

    An empty result is evidence, not proof, that the map is continuous on
    the sampled region.
    """
    if delta <= 0:
        raise UsageError("delta must be positive")
    P = _sample_points(samples, action.space)
    images = images if images is not None else e_image(P, action, eps, budget)
    D = action.space.pairwise(P, P)
    out = []
    for i, j in zip(*np.nonzero(np.triu(D < delta, 1))):
        h = hausdorff_distance(images[i][1].points, images[j][1].points)
        if h >= factor * delta:
            out.append(Witness(int(i), int(j), float(D[i, j]), h))
    return out


def _cluster(sets: list[CompactSet], tol: float) -> tuple[list[int], list[int]]:
    """Greedy clustering in input order; returns (representatives, labels)."""
    reps: list[int] = []
    labels: list[int] = []
    for i, s in enumerate(sets):
        for c, r in enumerate(reps):
            if hausdorff_distance(s, sets[r]) <= tol:
                labels.append(c)
                break
        else:
            labels.append(len(reps))
            reps.append(i)
    return reps, labels


def _dmat(sets: list[CompactSet]) -> np.ndarray:
    k = len(sets)
    D = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            D[a, b] = D[b, a] = hausdorff_distance(sets[a], sets[b])
    return D


@dataclass
class QuotientApprox:
    """Clustered sample of the Hausdorff quotient inside the hyperspace."""

    classes: list[CompactSet]
    dmat: np.ndarray
    u_used: str
    cluster_tol: float
    eps: float
    members: list[list[int]] = field(default_factory=list)
    diagnostics: list[Witness] = field(default_factory=list)
    removed: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.classes)

    def plot_data(self) -> np.ndarray:
        return classical_mds(self.dmat, 2)

    def to_dict(self) -> dict:
        return {
            "classes": len(self.classes),
            "u_used": self.u_used,
            "cluster_tol": self.cluster_tol,
            "eps": self.eps,
            "class_points": [c.points.tolist() for c in self.classes],
            "class_members": self.members,
            "dmat": self.dmat.tolist(),
            "removed_samples": self.removed,
            "diagnostics": [w.to_dict() for w in self.diagnostics],
        }


def default_delta(P: np.ndarray, space: Space) -> float:
    """1.5 times the largest nearest-neighbour gap of the sample."""
    if len(P) < 2:
        return 1.0
    D = space.pairwise(P, P)
    np.fill_diagonal(D, np.inf)
    return 1.5 * float(D.min(axis=1).max())


def hausdorff_quotient(samples, action: GroupAction, eps: float, budget: int, cluster_tol: float,
                       u_spec: Callable[[np.ndarray], np.ndarray] | None = None, *,
                       delta: float | None = None, factor: float = 10.0, u_label: str | None = None) -> QuotientApprox:
    """Approximate ``X /_H G`` from a finite sample of ``X``.

    With ``u_spec`` (a vectorised predicate selecting an invariant dense
    open set) the quotient is the clustered image of the samples inside it.
    Without it, samples at which the orbit-closure map jumps are removed
    round by round until no discontinuity witness remains; a sample is
    removed when more than half of its ``delta``-neighbours witness against
    it (both ends of an isolated witnessing pair are removed).
    """
    if cluster_tol <= 0:
        raise UsageError("cluster_tol must be positive")
    P = _sample_points(samples, action.space)
    images = [oc for _, oc in e_image(P, action, eps, budget)]
    alive = np.ones(len(P), dtype=bool)
    witnesses: list[Witness] = []
    if u_spec is not None:
        alive &= np.asarray(u_spec(P), dtype=bool)
        u_used = u_label or "u_spec"
    else:
        delta = delta if delta is not None else default_delta(P, action.space)
        D = action.space.pairwise(P, P)
        u_used = f"stability filtering (delta={delta!r}, factor={factor!r})"
        while True:
            idx = np.flatnonzero(alive)
            sub = [images[i] for i in idx]
            found = stability_probe(P[idx], action, eps, budget, delta, factor, images=list(zip(P[idx], sub)))
            if not found:
                break
            found = [Witness(int(idx[w.i]), int(idx[w.j]), w.distance, w.hausdorff) for w in found]
            witnesses.extend(found)
            hits = np.zeros(len(P))
            for w in found:
                hits[w.i] += 1
                hits[w.j] += 1
            near = ((D < delta) & alive[None, :] & alive[:, None]).sum(axis=1) - 1
            drop = alive & (2 * hits > near)
            if not drop.any():
                worst = np.max(np.where(alive, hits / np.maximum(near, 1), -1))
                drop = alive & (hits / np.maximum(near, 1) == worst)
            alive &= ~drop
    keep = np.flatnonzero(alive)
    if not len(keep):
        raise DegenerateQuotientError("no samples survive; the quotient approximation is empty")
    sets = [images[i].points for i in keep]
    reps, labels = _cluster(sets, cluster_tol)
    classes = [sets[r] for r in reps]
    members = [[int(keep[i]) for i, l in enumerate(labels) if l == c] for c in range(len(reps))]
    return QuotientApprox(classes, _dmat(classes), u_used, cluster_tol, eps, members, witnesses,
                          np.flatnonzero(~alive).tolist())


def match_classes(A: list[CompactSet], B: list[CompactSet], tol: float) -> tuple[bool, list[tuple[int, int]], float]:
    """Bijection between two class lists pairing sets within ``tol``.

    Returns (found, pairs, worst matched distance).
    """
    if len(A) != len(B):
        return False, [], float("inf")
    if not A:
        return True, [], 0.0
    C = np.array([[hausdorff_distance(a, b) for b in B] for a in A])
    rows, cols = linear_sum_assignment(C)
    worst = float(C[rows, cols].max())
    return worst <= tol, list(zip(rows.tolist(), cols.tolist())), worst


@dataclass
class CheckResult:
    passed: bool
    detail: dict = field(default_factory=dict)
    caveat: str | None = None

    def __bool__(self) -> bool:
        return self.passed


def semi_stability_check(q: QuotientApprox, u_samples, action: GroupAction, eps: float, budget: int,
                         tol: float) -> CheckResult:
    """Does the clustered closure of ``e(U)`` reproduce the quotient classes?"""
    P = _sample_points(u_samples, action.space)
    if q.classes and not q.classes[0].ambient.compatible(action.space):
        raise UsageError("quotient was computed on a different ambient space")
    sets = [oc.points for _, oc in e_image(P, action, eps, budget)]
    reps, _ = _cluster(sets, q.cluster_tol)
    found = [sets[r] for r in reps]
    ok, pairs, worst = match_classes(found, q.classes, tol)
    return CheckResult(ok, {"classes_u": len(found), "classes_q": len(q.classes), "worst": worst})


def orbit_classes(samples, action: GroupAction, eps: float, budget: int, tol: float) -> list[list[int]]:
    """Orbit-equivalence classes of samples read off their closures.

    ``x ~ y`` iff the closures are within ``tol`` and each base point lies
    within ``tol`` of the other's closure; classes are connected components.
    """
    P = _sample_points(samples, action.space)
    space = action.space
    closures = [oc.points for _, oc in e_image(P, action, eps, budget)]
    parent = list(range(len(P)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(P)):
        for j in range(i + 1, len(P)):
            if find(i) == find(j):
                continue
            if (hausdorff_distance(closures[i], closures[j]) < tol
                    and space.pairwise(P[i : i + 1], closures[j].points).min() < tol
                    and space.pairwise(P[j : j + 1], closures[i].points).min() < tol):
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(len(P)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def compare_topological_quotient(samples, action: GroupAction, q: QuotientApprox, tol: float,
                                 budget: int = 100_000) -> CheckResult:
    """Orbit classes of the samples versus the Hausdorff quotient classes.

    Only meaningful for compact groups acting on compact spaces; the caller
    asserts that hypothesis, which is reported as a caveat.
    """
    P = _sample_points(samples, action.space)
    groups = orbit_classes(P, action, q.eps, budget, tol)
    reps = [CompactSet(action.space, P[g], resolution=q.eps) for g in groups]
    ok, pairs, worst = match_classes(reps, q.classes, tol)
    return CheckResult(ok, {"orbits": len(groups), "classes": len(q.classes), "worst": worst},
                       caveat="compactness of G and X is asserted by the caller, not checked")


def fiber_embedding_check(x_samples: CompactSet, y_samples: CompactSet, qmap, tol: float) -> CheckResult:
    """Fibres of a surjection as points of the hyperspace of ``X``.

    ``qmap`` sends each index of ``x_samples`` to an index of ``y_samples``
    (an array or a callable on index arrays).  The check passes when every
    pair of targets at least ``tol`` apart has fibres at least ``tol`` apart;
    the ratio of fibre distance to target distance is reported both ways.
    """
    nx, ny = len(x_samples), len(y_samples)
    image = np.asarray(qmap(np.arange(nx)) if callable(qmap) else qmap, dtype=np.int64)
    if image.shape != (nx,) or (nx and (image.min() < 0 or image.max() >= ny)):
        raise UsageError("qmap must send every x sample to a y sample index")
    missing = sorted(set(range(ny)) - set(image.tolist()))
    if missing:
        raise UsageError(f"qmap is not surjective: no preimage for y samples {missing[:5]}")
    fibers = [x_samples.subset(image == j) for j in range(ny)]
    DY = y_samples.ambient.pairwise(y_samples.points, y_samples.points)
    DH = _dmat(fibers)
    iu = np.triu_indices(ny, 1)
    ratio = DH[iu] / np.where(DY[iu] > 0, DY[iu], np.inf)
    far = DY[iu] >= tol
    bad = far & (DH[iu] < tol)
    detail = {
        "fibers": [f.points.tolist() for f in fibers],
        "min_ratio": float(ratio.min()) if ratio.size else None,
        "max_ratio": float(ratio.max()) if ratio.size else None,
        "violations": [(int(iu[0][k]), int(iu[1][k])) for k in np.flatnonzero(bad)],
    }
    return CheckResult(not bad.any(), detail, caveat="openness and properness of qmap are asserted by the caller")


def classical_mds(D: np.ndarray, dim: int = 2) -> np.ndarray:
    """Torgerson scaling of a distance matrix to ``dim`` coordinates."""
    n = len(D)
    if n == 0:
        return np.zeros((0, dim))
    J = np.eye(n) - 1.0 / n
    B = -0.5 * J @ (D**2) @ J
    w, V = np.linalg.eigh(B)
    order = np.argsort(w)[::-1][:dim]
    coords = V[:, order] * np.sqrt(np.clip(w[order], 0.0, None))
    if coords.shape[1] < dim:
        coords = np.pad(coords, ((0, 0), (0, dim - coords.shape[1])))
    # fix the sign of each axis so reruns agree
    for k in range(coords.shape[1]):
        col = coords[:, k]
        pivot = np.argmax(np.abs(col))
        if col[pivot] < 0:
            coords[:, k] = -col
    return coords
