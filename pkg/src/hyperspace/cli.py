"""Command-line entry point: ``hyperspace {dist,verify,quotient,example}``.

Exit codes: 0 when every check passed, 1 when a check failed, 2 on usage
or parse errors.  A human summary goes to stdout; ``--output`` receives the
full JSON report, whose content depends only on inputs, flags and seed.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import demos, hspace
from .errors import ActionError, CapacityError, DegenerateQuotientError, UsageError
from .hausdorff import CompactSet, directed_hausdorff, epsilon_net, hausdorff_distance, hausdorff_distance_fast
from .io import coordinate_space, load_action, load_cloud, load_finite_space, write_report
from .metric import FiniteSpace, verify_metric_axioms
from .quotient import hausdorff_quotient

DEFAULT_SEED = 20151009
EPS_GRID = [round(0.1 * k, 1) for k in range(1, 11)]


@dataclass
class RunConfig:
    metric: str = "euclid-cutoff"
    eps: float = 0.01
    tol: float = 1e-9
    cluster_tol: float = 0.1
    budget: int = 100_000
    snap: float = 1e-9
    seed: int = DEFAULT_SEED
    output: str | None = None

    def __post_init__(self):
        if self.eps <= 0 or self.tol <= 0 or self.cluster_tol <= 0:
            raise UsageError("--eps, --tol and --cluster-tol must be positive")
        if self.budget < 1:
            raise UsageError("--budget must be at least 1")


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _ambient(cfg: RunConfig, dim: int | None):
    if cfg.metric.startswith("matrix:"):
        return load_finite_space(cfg.metric[len("matrix:"):])
    return coordinate_space(cfg.metric, dim or 1)


def _cloud_dim(*clouds) -> int | None:
    for c in clouds:
        if len(c):
            first = c[0]
            return len(first) if isinstance(first, (list, tuple)) else 1
    return None


def _check(name: str, passed: bool, **fields) -> dict:
    return {"check": name, "pass": bool(passed), **fields}


def _finish(report: dict, cfg: RunConfig) -> int:
    checks = report.get("checks", [])
    report["pass"] = all(c["pass"] for c in checks)
    for c in checks:
        print(f"{'PASS' if c['pass'] else 'FAIL'}  {c['check']}")
    if cfg.output:
        write_report(report, cfg.output)
    return 0 if report["pass"] else 1


# ------------------------------------------------------------------- dist


def cmd_dist(args, cfg: RunConfig) -> int:
    a, b = load_cloud(args.file_a), load_cloud(args.file_b)
    space = _ambient(cfg, _cloud_dim(a, b))
    if isinstance(space, FiniteSpace):
        bad = verify_metric_axioms(space)
        if bad:
            raise UsageError(f"matrix is not a bounded metric: {bad[0].check} at {bad[0].witness}")
    A, B = CompactSet(space, a), CompactSet(space, b)
    ab, ba, d = directed_hausdorff(A, B), directed_hausdorff(B, A), hausdorff_distance(A, B)
    print(f"directed A->B  {fmt(ab)}")
    print(f"directed B->A  {fmt(ba)}")
    print(f"hausdorff      {fmt(d)}")
    report = {"command": "dist", "metric": cfg.metric, "sizes": [len(A), len(B)],
              "directed_ab": ab, "directed_ba": ba, "hausdorff": d, "checks": []}
    if args.fast:
        fast = hausdorff_distance_fast(A, B)
        print(f"fast           {fmt(fast)}")
        report["fast"] = fast
        report["checks"].append(_check("fast kernel equals brute force", fast == d))
    return _finish(report, cfg)


# ----------------------------------------------------------------- verify


def _battery(rng, count: int, n_max: int, n_min: int = 1):
    for _ in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        yield hspace.random_finite_space(rng, n)


def suite_metric(cfg: RunConfig, args) -> list[dict]:
    checks = []
    if cfg.metric.startswith("matrix:"):
        space = load_finite_space(cfg.metric[len("matrix:"):])
        bad = verify_metric_axioms(space)
        checks.append(_check(f"metric axioms of {cfg.metric[7:]}", not bad,
                             violations=[f.to_dict() for f in bad[:20]]))
        return checks
    rng = np.random.default_rng(cfg.seed)
    for k, space in enumerate(_battery(rng, args.count, min(args.n or 8, 8))):
        bad = verify_metric_axioms(space)
        h = hspace.enumerate_h(space)
        hbad = verify_metric_axioms(FiniteSpace(h.dmat), tol=1e-12)
        checks.append(_check(f"space {k} (n={space.n}) metric axioms", not bad, violations=len(bad)))
        checks.append(_check(f"space {k} (n={space.n}) Hausdorff metric axioms on 2^n subsets",
                             not hbad, violations=[f.to_dict() for f in hbad[:5]]))
    return checks


def suite_universal(cfg: RunConfig, args) -> list[dict]:
    rng = np.random.default_rng(cfg.seed)
    checks = []
    for k, space in enumerate(_battery(rng, args.count, min(args.n or 6, 8))):
        h = hspace.enumerate_h(space)
        u = hspace.UniversalFamily.over(h)
        closed = hspace.verify_z_closed(h, u)
        opened = hspace.verify_pi1_open(h, u, EPS_GRID)
        checks.append(_check(f"space {k} (n={space.n}) incidence set closed", not closed,
                             violations=[f.to_dict() for f in closed[:5]]))
        checks.append(_check(f"space {k} (n={space.n}) projection open (ball identity)", not opened,
                             violations=[f.to_dict() for f in opened[:5]]))
    fam = hspace.line_family(200, extra_zero=False)
    res = hspace.verify_pi1_proper(fam, [t.points[0] for t in fam.terms], 0.05)
    checks.append(_check("projection proper on Z_n={1/n}", res.ok, point=np.asarray(res.point).tolist(),
                         count=res.count, tail=res.tail))
    return checks


def suite_continuity(cfg: RunConfig, args) -> list[dict]:
    rng = np.random.default_rng(cfg.seed)
    checks = []
    line = hspace.verify_family_continuity(hspace.line_family(200), 0.1)
    print(f"N(0.1) for Z_n = {{0, 1/n}}: {line.index}")
    checks.append(_check("Z_n={0,1/n}: N(0.1) = 11", line.index == 11, index=line.index))
    pairs, triples = hspace.collision_families(200)
    for name, fam in (("colliding pairs", pairs), ("colliding triples", triples)):
        r = hspace.verify_family_continuity(fam, 0.1)
        checks.append(_check(f"{name} converge to the origin", r.ok, index=r.index))
    mismatches = 0
    families = 0
    for space in _battery(rng, max(1, args.count // 4), min(args.n or 6, 8), n_min=2):
        h = hspace.enumerate_h(space)
        for _ in range(25):
            fam = hspace.random_family(rng, h, 12)
            for eps in (0.1, 0.3, 0.5, 1.0):
                mismatches += len(hspace.verify_family_continuity(fam, eps).mismatches)
            families += 1
    checks.append(_check(f"covering conditions iff d_H < eps on {families} random families", mismatches == 0,
                         mismatches=mismatches))
    return checks


def suite_compactness(cfg: RunConfig, args) -> list[dict]:
    rng = np.random.default_rng(cfg.seed)
    checks = []
    space = FiniteSpace.from_points(np.linspace(0.0, 1.0, 8))
    net = epsilon_net(CompactSet(space, range(8)), 0.15)
    bad = hspace.verify_compactness_net(hspace.enumerate_h(space), 0.15, net)
    checks.append(_check("8-point [0,1], 0.15-net covers all 255 subsets", not bad, net=net.points.tolist()))
    for k, space in enumerate(_battery(rng, args.count, min(args.n or 8, 8))):
        eps = float(rng.choice([0.1, 0.2, 0.35, 0.5]))
        net = epsilon_net(CompactSet(space, range(space.n)), eps)
        bad = hspace.verify_compactness_net(hspace.enumerate_h(space), eps, net)
        checks.append(_check(f"space {k} (n={space.n}) eps={eps} net check", not bad, failures=len(bad)))
    return checks


SUITES = {
    "metric": suite_metric,
    "universal": suite_universal,
    "continuity": suite_continuity,
    "compactness": suite_compactness,
}


def cmd_verify(args, cfg: RunConfig) -> int:
    print(f"seed {cfg.seed}")
    report = {"command": "verify", "suite": args.suite, "seed": cfg.seed, "checks": SUITES[args.suite](cfg, args)}
    return _finish(report, cfg)


# --------------------------------------------------------------- quotient


def _quotient_report(q) -> dict:
    d = q.to_dict()
    d["plot"] = q.plot_data().tolist()
    return d


def _write_plot(q, output: str | None) -> None:
    if not output:
        return
    coords = q.plot_data()
    lines = ["class,x,y"] + [f"{i},{fmt(x)},{fmt(y)}" for i, (x, y) in enumerate(coords)]
    Path(output).with_suffix(".plot.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_quotient(args, cfg: RunConfig) -> int:
    from .io import _read_json, finite_space_from_dict

    doc = _read_json(args.space)
    if isinstance(doc, dict) and "dist" in doc:
        space = finite_space_from_dict(doc)
        samples = np.arange(space.n)
    else:
        pts = load_cloud(args.space)
        space = _ambient(cfg, _cloud_dim(pts))
        samples = space.as_points(pts)
    action = load_action(args.action, space, snap=cfg.snap)
    q = hausdorff_quotient(samples, action, cfg.eps, cfg.budget, cfg.cluster_tol)
    print(f"classes {len(q)}")
    for i, c in enumerate(q.classes):
        print(f"  class {i}: {len(c)} points, samples {q.members[i][:10]}{' ...' if len(q.members[i]) > 10 else ''}")
    report = {"command": "quotient", "config": asdict(cfg), "quotient": _quotient_report(q), "checks": []}
    _write_plot(q, cfg.output)
    return _finish(report, cfg)


# ---------------------------------------------------------------- example


def _claim(name: str, claimed, computed, passed: bool) -> dict:
    print(f"  {name}: claimed {claimed}, computed {computed}")
    return _check(name, passed, claimed=claimed, computed=computed)


def cmd_example(args, cfg: RunConfig) -> int:
    name = args.name
    report: dict = {"command": "example", "name": name}
    checks = []
    q = None
    if name == "example1-lines":
        r = demos.example1_lines()
        checks.append(_claim("cut-off Euclidean d(L1, L2)", 1.0, fmt(r["euclid_L1_L2"]), r["euclid_L1_L2"] == 1.0))
        vals = ", ".join(fmt(v) for v in r["disk_to_vertical"])
        checks.append(_claim(f"disk-pullback d(L_n, vertical), n={r['slopes']}", "decreasing to 0", vals,
                             r["decreasing"] and r["disk_to_vertical"][-1] < 0.2))
        report["result"] = r
    elif name == "halfline-scaling":
        r = demos.halfline_demo(eps=cfg.eps, cluster_tol=cfg.cluster_tol, budget=cfg.budget)
        q = r["quotient"]
        checks.append(_claim("quotient classes", 1, len(q), len(q) == 1))
        checks.append(_claim("classes without a prescribed U", 1, len(r["quotient_auto"]), len(r["quotient_auto"]) == 1))
        print("  U          stable  semi-stable")
        for row in r["table"]:
            print(f"  {row['U']:<10} {str(row['stable']):<7} {row['semi_stable']}")
        stable = [row["U"] for row in r["table"] if row["stable"]]
        semi = [row["U"] for row in r["table"] if row["semi_stable"]]
        checks.append(_check("only (0,inf) stable and semi-stable", stable == semi == ["(0,inf)"], table=r["table"]))
        report["table"] = r["table"]
    elif name == "circle-rotation":
        n, k = args.n or 64, args.k or 4
        r = demos.circle_rotation_demo(n, k)
        q = r["quotient"]
        checks.append(_claim("quotient classes", f"{n // k} orbits", len(q), len(q) == r["orbits"]))
        cmp = r["orbit_match"]
        checks.append(_claim("classes biject with orbits", True, cmp.passed, cmp.passed))
    elif name == "morse-circle":
        n = args.n or 64
        q = demos.morse_flow_demo(n, eps=cfg.eps, cluster_tol=cfg.cluster_tol, budget=cfg.budget)
        checks.append(_claim("quotient classes", 2, len(q), len(q) == 2))
    elif name == "collision-family":
        r = demos.collision_demo()
        checks.append(_claim("pairs and triples share the limit {0}", True, r["same_limit"], r["same_limit"]))
        checks.append(_claim("pairs converge (N(0.1))", "finite", r["pairs_index"], r["pairs_index"] is not None))
        checks.append(_claim("triples converge (N(0.1))", "finite", r["triples_index"], r["triples_index"] is not None))
        checks.append(_claim("Z_n={0,1/n}: N(0.1)", 11, r["line_index"], r["line_index"] == 11))
        report["result"] = r
    else:
        raise UsageError(f"unknown example {name!r}; choose from {', '.join(demos.EXAMPLES)}")
    if q is not None:
        report["quotient"] = _quotient_report(q)
        _write_plot(q, cfg.output)
    report["checks"] = checks
    return _finish(report, cfg)


# ------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--metric", default="euclid-cutoff", help="euclid-cutoff, disk-pullback or matrix:<path>")
    common.add_argument("--eps", type=float, default=0.01)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--cluster-tol", type=float, default=0.1)
    common.add_argument("--budget", type=int, default=100_000)
    common.add_argument("--snap", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--output", help="write the full JSON report here")
    common.add_argument("--n", type=int, help="sample or space size")
    common.add_argument("--k", type=int, help="group order for circle-rotation")

    parser = argparse.ArgumentParser(prog="hyperspace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("dist", parents=[common], help="Hausdorff distance between two point files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--fast", action="store_true", help="also run the indexed kernel and compare")
    p.set_defaults(func=cmd_dist)
    p = sub.add_parser("verify", parents=[common], help="run a verification battery")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--count", type=int, default=20, help="random spaces in the battery")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("quotient", parents=[common], help="approximate Hausdorff quotient")
    p.add_argument("space", help="finite space document or point cloud")
    p.add_argument("action", help="action document")
    p.set_defaults(func=cmd_quotient)
    p = sub.add_parser("example", parents=[common], help="run a built-in worked example")
    p.add_argument("name", help=", ".join(demos.EXAMPLES))
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.metric, args.eps, args.tol, args.cluster_tol, args.budget, args.snap, args.seed,
                        args.output)
        return args.func(args, cfg)
    except DegenerateQuotientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, CapacityError, ActionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
