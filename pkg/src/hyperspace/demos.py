"""Built-in worked examples.

Each demo returns plain data (claimed values next to computed ones) so the
CLI and the acceptance tests share one code path.
"""
from __future__ import annotations

import math

import numpy as np

from .hausdorff import CompactSet, hausdorff_distance
from .hspace import collision_families, line_family, verify_family_continuity
from .metric import CoordinateSpace, FiniteSpace, disk_pullback_metric, euclidean_cutoff
from .quotient import (
    QuotientApprox,
    circle_height_flow,
    compare_topological_quotient,
    coordinate_action,
    halfline_scale,
    hausdorff_quotient,
    permutation_action,
    semi_stability_check,
    stability_probe,
)

EXAMPLES = ("example1-lines", "halfline-scaling", "circle-rotation", "morse-circle", "collision-family")


# ------------------------------------------------------------ lines in R^2


def line_sample(slope: float | None, tmax: float = 1e4, m: int = 2001) -> np.ndarray:
    """Points of the line through the origin with ``slope`` (``None``: vertical).

    Parameters run over ``|t| <= tmax`` spaced evenly in ``t / (1 + t)`` so
    the sample stays fine near the origin and reaches out to ``tmax``.
    """
    u = np.linspace(0.0, tmax / (1.0 + tmax), m)
    t = u / (1.0 - u)
    t[-1] = tmax
    t = np.concatenate([-t[:0:-1], t])
    if slope is None:
        return np.stack([np.zeros_like(t), t], axis=1)
    return np.stack([t, slope * t], axis=1)


def example1_lines(slopes=(1, 2, 4, 8, 16), tmax: float = 1e4, m: int = 2001) -> dict:
    """Cut-off Euclidean vs disk-pullback Hausdorff distances between lines."""
    euclid = CoordinateSpace(euclidean_cutoff(), 2)
    disk = CoordinateSpace(disk_pullback_metric(), 2)
    L1 = CompactSet(euclid, line_sample(1, tmax, m))
    L2 = CompactSet(euclid, line_sample(2, tmax, m))
    vertical = CompactSet(disk, line_sample(None, tmax, m))
    to_vertical = [hausdorff_distance(CompactSet(disk, line_sample(s, tmax, m)), vertical) for s in slopes]
    return {
        "euclid_L1_L2": hausdorff_distance(L1, L2),
        "claimed_euclid_L1_L2": 1.0,
        "slopes": list(slopes),
        "disk_to_vertical": to_vertical,
        "decreasing": all(a > b for a, b in zip(to_vertical, to_vertical[1:])),
    }


# ---------------------------------------------------------- [0, inf] model

HALFLINE_OPENS = {
    "[0,inf]": lambda S: np.ones(len(S), dtype=bool),
    "(0,inf]": lambda S: S[:, 0] > 0.0,
    "[0,inf)": lambda S: S[:, 0] < 1.0,
    "(0,inf)": lambda S: (S[:, 0] > 0.0) & (S[:, 0] < 1.0),
}


def halfline_action(space: CoordinateSpace | None = None):
    """Positive reals acting on ``[0, inf]`` modelled as ``[0, 1]``.

    Scaling by 2 and 3 (and inverses) generates a dense subgroup.
    """
    space = space or CoordinateSpace(euclidean_cutoff(), 1)
    steps = (2.0, 0.5, 3.0, 1.0 / 3.0)
    return coordinate_action(space, [halfline_scale(c) for c in steps], [f"scale x{c:g}" for c in steps])


def halfline_demo(n: int = 101, eps: float = 0.01, cluster_tol: float = 0.1, budget: int = 100_000) -> dict:
    """Quotient of ``[0, inf]`` by scaling and the table of invariant dense opens."""
    action = halfline_action()
    S = np.linspace(0.0, 1.0, n)[:, None]
    delta = 1.5 / (n - 1)
    q = hausdorff_quotient(S, action, eps, budget, cluster_tol, HALFLINE_OPENS["(0,inf)"], u_label="(0,inf)")
    q_auto = hausdorff_quotient(S, action, eps, budget, cluster_tol, delta=delta)
    table = []
    for name, pred in HALFLINE_OPENS.items():
        U = S[pred(S)]
        stable = not stability_probe(U, action, eps, budget, delta)
        semi = semi_stability_check(q, U, action, eps, budget, cluster_tol).passed
        table.append({"U": name, "stable": stable, "semi_stable": semi})
    return {
        "quotient": q,
        "quotient_auto": q_auto,
        "classes": len(q),
        "claimed_classes": 1,
        "table": table,
        "claimed_stable": ["(0,inf)"],
    }


# ------------------------------------------------------------------ circle


def circle_points(n: int, radius: float = 1.0) -> np.ndarray:
    theta = 2 * np.pi * np.arange(n) / n
    return np.stack([radius * np.sin(theta), radius * np.cos(theta)], axis=1)


def circle_rotation_action(n: int = 64, k: int = 4):
    """Cyclic group of order ``k`` rotating an ``n``-point circle sample."""
    if n % k:
        raise ValueError("k must divide n")
    space = FiniteSpace.from_points(circle_points(n), euclidean_cutoff())
    table = (np.arange(n) + n // k) % n
    return space, permutation_action(space, [table], [f"rotate 1/{k}"])


def brute_force_orbits(tables, n: int) -> list[list[int]]:
    """Orbits of the group generated by permutation tables, by closure."""
    left = set(range(n))
    orbits = []
    while left:
        seed = min(left)
        orbit = {seed}
        stack = [seed]
        while stack:
            i = stack.pop()
            for t in tables:
                j = int(t[i])
                if j not in orbit:
                    orbit.add(j)
                    stack.append(j)
        orbits.append(sorted(orbit))
        left -= orbit
    return orbits


def circle_rotation_demo(n: int = 64, k: int = 4, eps: float = 1e-6) -> dict:
    space, action = circle_rotation_action(n, k)
    orbits = brute_force_orbits([(np.arange(n) + n // k) % n], n)
    sets = [CompactSet(space, o) for o in orbits]
    inter = min(hausdorff_distance(a, b) for i, a in enumerate(sets) for b in sets[i + 1 :])
    tol = inter / 2
    samples = np.arange(n)
    q = hausdorff_quotient(samples, action, eps, 10 * n, tol, lambda P: np.ones(len(P), dtype=bool),
                           u_label="X")
    cmp = compare_topological_quotient(samples, action, q, tol)
    return {"quotient": q, "classes": len(q), "orbits": len(orbits), "tol": tol, "orbit_match": cmp}


MORSE_RADIUS = 0.25


def morse_flow_demo(n: int = 64, eps: float = 0.01, cluster_tol: float = 0.1, const: bool = False,
                    budget: int = 100_000) -> QuotientApprox:
    """Gradient flow of the height on a circle of radius 0.25.

    Flow times 1 and sqrt(2) (with inverses) generate a dense subgroup of
    the real line.  The quotient is computed without a prescribed open set,
    so the two critical points are found and removed as discontinuities.
    """
    space = CoordinateSpace(euclidean_cutoff(), 2)
    times = (1.0, -1.0, math.sqrt(2.0), -math.sqrt(2.0))
    action = coordinate_action(
        space,
        [circle_height_flow(t, MORSE_RADIUS, const=const) for t in times],
        [f"flow t={t:+.4g}" for t in times],
    )
    P = circle_points(n, MORSE_RADIUS)
    spacing = 2 * MORSE_RADIUS * math.sin(math.pi / n)
    return hausdorff_quotient(P, action, eps, budget, cluster_tol, delta=1.5 * spacing)


# --------------------------------------------------------------- families


def collision_demo(N: int = 200, eps: float = 0.1) -> dict:
    pairs, triples = collision_families(N)
    a = verify_family_continuity(pairs, eps)
    b = verify_family_continuity(triples, eps)
    line = verify_family_continuity(line_family(N), 0.1)
    return {
        "pairs_index": a.index,
        "triples_index": b.index,
        "pairs_tail": float(pairs.distances()[-1]),
        "triples_tail": float(triples.distances()[-1]),
        "same_limit": hausdorff_distance(pairs.limit, triples.limit) == 0.0,
        "line_index": line.index,
        "claimed_line_index": 11,
        "mismatches": len(a.mismatches) + len(b.mismatches) + len(line.mismatches),
    }
