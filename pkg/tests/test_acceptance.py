"""Acceptance criteria, one test each, with the stated tolerances and time limits.

Every test appends a PASS/FAIL line to ``ACCEPTANCE_LINES``; the lines are
printed in the pytest terminal summary and also to stdout (visible with -s).
"""
import math
import time

import numpy as np
import pytest

from hyperspace.demos import circle_rotation_demo, example1_lines, halfline_demo, morse_flow_demo
from hyperspace.hausdorff import CompactSet, benchmark, epsilon_net, hausdorff_distance, hausdorff_distance_fast
from hyperspace.hspace import (
    UniversalFamily,
    enumerate_h,
    line_family,
    random_family,
    random_finite_space,
    verify_compactness_net,
    verify_family_continuity,
    verify_pi1_open,
    verify_z_closed,
)
from hyperspace.metric import CoordinateSpace, FiniteSpace, disk_pullback_metric, euclidean_cutoff, verify_metric_axioms
from hyperspace.quotient import match_classes
from oracles import ACCEPTANCE_LINES, brute_hausdorff, diameter_gap

EPS_GRID = [round(0.1 * k, 1) for k in range(1, 11)]


def record(name, passed, elapsed, limit, detail=""):
    ok = bool(passed) and elapsed < limit
    line = f"{'PASS' if ok else 'FAIL'}  {name}  ({elapsed:.2f}s / {limit:g}s){'  ' + detail if detail else ''}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line
    assert elapsed < limit, line


def battery(seed, count, n_max, n_min=1):
    gen = np.random.default_rng(seed)
    return [random_finite_space(gen, int(gen.integers(n_min, n_max + 1))) for _ in range(count)]


def test_empty_set_convention():
    t0 = time.perf_counter()
    checked, ok = 0, True
    for space in battery(1, 20, 8):
        h = enumerate_h(space)
        row = h.dmat[0, 1:]
        ok &= bool(np.all(row == 1.0)) and bool(np.all(h.dmat[1:, 0] == 1.0))
        checked += len(row)
    record("empty-set convention d_H(empty, B) = 1", ok, time.perf_counter() - t0, 1,
           f"{checked} nonempty sets")


def test_hausdorff_metric_axioms():
    t0 = time.perf_counter()
    spaces = battery(2, 24, 8, n_min=5)
    failures = 0
    oracle_checked = 0
    for space in spaces:
        h = enumerate_h(space)
        failures += len(verify_metric_axioms(FiniteSpace(h.dmat), tol=1e-12))
        # spot-check the matrix against the plain definition
        D = space.dist.tolist()
        members = [np.flatnonzero(r).tolist() for r in h.membership]
        for a in range(0, h.size, 17):
            for b in range(0, h.size, 13):
                failures += h.dmat[a, b] != brute_hausdorff(D, members[a], members[b])
                oracle_checked += 1
    record("Hausdorff metric axioms on all subsets", failures == 0, time.perf_counter() - t0, 30,
           f"{len(spaces)} spaces, n <= 8, {oracle_checked} oracle pairs, {failures} failures")


def test_sampled_lines():
    t0 = time.perf_counter()
    r = example1_lines()
    radius = 1e4 / (1 + 1e4)
    expected = [diameter_gap(s, radius) for s in r["slopes"]]
    vals = r["disk_to_vertical"]
    close = all(abs(v - e) <= 1e-3 for v, e in zip(vals, expected))
    passed = r["euclid_L1_L2"] == 1.0 and r["decreasing"] and vals[-1] < 0.2 and close
    record("lines: cutoff d = 1, disk-pullback decreasing and < 0.2", passed, time.perf_counter() - t0, 10,
           "values " + ", ".join(f"{v:.5f}" for v in vals))


@pytest.fixture(scope="module")
def ball_battery():
    return battery(4, 24, 6)


def test_ball_identity(ball_battery):
    t0 = time.perf_counter()
    failures = 0
    pairs = 0
    for space in ball_battery:
        h = enumerate_h(space)
        u = UniversalFamily.over(h)
        failures += len(verify_pi1_open(h, u, EPS_GRID))
        pairs += len(u.pairs)
    record("projection ball identity", failures == 0, time.perf_counter() - t0, 60,
           f"{len(ball_battery)} spaces, {pairs} pairs x {len(EPS_GRID)} radii")


def test_incidence_closed(ball_battery):
    t0 = time.perf_counter()
    failures = 0
    for space in ball_battery:
        h = enumerate_h(space)
        failures += len(verify_z_closed(h, UniversalFamily.over(h)))
    record("incidence set closed", failures == 0, time.perf_counter() - t0, 30,
           f"{len(ball_battery)} spaces")


def test_family_characterization():
    t0 = time.perf_counter()
    gen = np.random.default_rng(6)
    mismatches = families = 0
    for space in battery(6, 10, 6, n_min=2):
        h = enumerate_h(space)
        for _ in range(12):
            f = random_family(gen, h, 15)
            for eps in (0.05, 0.1, 0.3, 0.5, 1.0):
                mismatches += len(verify_family_continuity(f, eps).mismatches)
            families += 1
    index = verify_family_continuity(line_family(200), 0.1).index
    record("convergence iff both covering conditions; N(0.1) = 11", mismatches == 0 and index == 11,
           time.perf_counter() - t0, 10, f"{families} families, N(0.1) = {index}")


def test_compactness_net():
    t0 = time.perf_counter()
    space = FiniteSpace.from_points(np.linspace(0.0, 1.0, 8), euclidean_cutoff())
    net = epsilon_net(CompactSet(space, range(8)), 0.15)
    h = enumerate_h(space)
    bad = verify_compactness_net(h, 0.15, net)
    record("0.15-net of 8 points covers all 255 subsets", not bad, time.perf_counter() - t0, 5,
           f"net {np.asarray(net.points).tolist()}")


def test_halfline_quotient():
    t0 = time.perf_counter()
    r = halfline_demo()
    stable = [row["U"] for row in r["table"] if row["stable"]]
    semi = [row["U"] for row in r["table"] if row["semi_stable"]]
    passed = len(r["quotient"]) == 1 and stable == semi == ["(0,inf)"]
    record("half-line scaling: one class, only (0,inf) stable", passed, time.perf_counter() - t0, 5,
           f"classes {len(r['quotient'])}, stable {stable}, semi-stable {semi}")


def test_circle_rotation():
    t0 = time.perf_counter()
    r = circle_rotation_demo(64, 4)
    passed = r["classes"] == r["orbits"] == 16 and r["orbit_match"].passed
    record("Z/4 on 64 points: classes biject with orbits", passed, time.perf_counter() - t0, 5,
           f"classes {r['classes']}, orbits {r['orbits']}, tol {r['tol']:.5f}")


def test_fast_equals_brute_force():
    t0 = time.perf_counter()
    gen = np.random.default_rng(10)
    spaces = [CoordinateSpace(euclidean_cutoff(), 2), CoordinateSpace(disk_pullback_metric(), 2)]
    unequal = 0
    sizes = []
    for k in range(100):
        if k < 2:
            na = nb = 10_000
        else:
            na, nb = (int(round(math.exp(gen.uniform(0, math.log(10_000))))) for _ in range(2))
        space = spaces[k % 2]
        scale = gen.choice([0.05, 1.0, 20.0])
        A = CompactSet(space, gen.normal(size=(na, 2)) * scale)
        B = CompactSet(space, gen.normal(size=(nb, 2)) * scale + gen.normal(size=2) * scale)
        if k < 2:
            b = benchmark(A, B)
            line = (f"benchmark {space.metric.name} {b.n_a}x{b.n_b}: brute {b.brute_seconds:.3f}s, "
                    f"fast {b.fast_seconds:.3f}s, speedup {b.speedup:.1f}x")
            ACCEPTANCE_LINES.append("      " + line)
            print(line)
            unequal += not b.equal
        else:
            unequal += hausdorff_distance_fast(A, B) != hausdorff_distance(A, B)
        sizes.append(max(na, nb))
    record("fast kernel bitwise equal to brute force", unequal == 0, time.perf_counter() - t0, 120,
           f"100 pairs, largest {max(sizes)} points, {unequal} unequal")


def test_morse_quotient():
    t0 = time.perf_counter()
    coarse = morse_flow_demo(64)
    fine = morse_flow_demo(256)
    ok, _, worst = match_classes(coarse.classes, fine.classes, 2 * coarse.eps)
    passed = len(coarse) == len(fine) == 2 and ok
    record("Morse flow: two classes, stable under 64 -> 256", passed, time.perf_counter() - t0, 10,
           f"classes {len(coarse)}/{len(fine)}, match distance {worst:.4f}")
