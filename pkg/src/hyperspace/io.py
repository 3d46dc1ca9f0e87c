"""JSON documents: finite spaces, point clouds, action specs and reports.

Finite space::

    {"n": 3, "labels": ["a", "b", "c"], "dist": [d10, d20, d21]}

``dist`` is the lower triangle in row-major order, either strictly below the
diagonal (``n(n-1)/2`` entries) or including it (``n(n+1)/2``).

Point cloud: a list of coordinate vectors, or ``{"points": [...]}``.  An
empty or whitespace-only file is the empty cloud.  Over a finite space the
"coordinates" are point indices.

Action spec::

    {"generators": [
        {"type": "permutation", "table": [1, 2, 0]},
        {"type": "rotation", "k": 1, "n": 4},
        {"type": "scale", "c": 2.0},
        {"type": "flow", "dt": 1.0, "radius": 0.25},
        {"type": "identity"}]}
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import UsageError
from .metric import CoordinateSpace, FiniteSpace
from .quotient import (
    GroupAction,
    circle_height_flow,
    coordinate_action,
    halfline_scale,
    permutation_action,
    rotation,
)


def _read_json(path) -> object:
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        return None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from exc


def finite_space_from_dict(doc: dict) -> FiniteSpace:
    try:
        n = int(doc["n"])
        tri = [float(v) for v in doc["dist"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"finite space document needs integer 'n' and list 'dist' ({exc})") from exc
    D = np.zeros((n, n))
    if len(tri) == n * (n - 1) // 2:
        rows, cols = np.tril_indices(n, -1)
    elif len(tri) == n * (n + 1) // 2:
        rows, cols = np.tril_indices(n)
    else:
        raise UsageError(f"'dist' has {len(tri)} entries; expected {n * (n - 1) // 2} or {n * (n + 1) // 2}")
    D[rows, cols] = tri
    D[cols, rows] = tri
    return FiniteSpace(D, labels=doc.get("labels"), coords=doc.get("coords"))


def finite_space_to_dict(space: FiniteSpace) -> dict:
    rows, cols = np.tril_indices(space.n, -1)
    doc: dict = {"n": space.n}
    if space.labels is not None:
        doc["labels"] = list(space.labels)
    doc["dist"] = space.dist[rows, cols].tolist()
    if space.coords is not None:
        doc["coords"] = space.coords.tolist()
    return doc


def load_finite_space(path) -> FiniteSpace:
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: expected a finite space object")
    return finite_space_from_dict(doc)


def save_finite_space(space: FiniteSpace, path) -> None:
    Path(path).write_text(json.dumps(finite_space_to_dict(space)), encoding="utf-8")


def load_cloud(path) -> list:
    doc = _read_json(path)
    if doc is None:
        return []
    if isinstance(doc, dict):
        doc = doc.get("points")
    if not isinstance(doc, list):
        raise UsageError(f"{path}: expected a list of points")
    return doc


def save_cloud(points, path) -> None:
    Path(path).write_text(json.dumps(np.asarray(points).tolist()), encoding="utf-8")


def action_from_dict(doc: dict, space, snap: float = 1e-9) -> GroupAction:
    gens = doc.get("generators") if isinstance(doc, dict) else None
    if not gens:
        raise UsageError("action document needs a non-empty 'generators' list")
    tables, maps, labels = [], [], []
    for g in gens:
        kind = g.get("type")
        label = g.get("label")
        if kind == "permutation":
            tables.append(g["table"])
            labels.append(label or f"perm{len(labels)}")
        elif kind == "identity":
            maps.append(lambda P: P.copy())
            labels.append(label or "id")
        elif kind == "rotation":
            maps.append(rotation(int(g.get("k", 1)), int(g["n"])))
            labels.append(label or f"rotate {g.get('k', 1)}/{g['n']}")
        elif kind == "scale":
            maps.append(halfline_scale(float(g["c"])))
            labels.append(label or f"scale x{g['c']}")
        elif kind == "flow":
            maps.append(circle_height_flow(float(g["dt"]), float(g.get("radius", 1.0))))
            labels.append(label or f"flow t={g['dt']}")
        else:
            raise UsageError(f"unknown generator type {kind!r}")
    if tables and maps:
        raise UsageError("cannot mix permutation tables with coordinate generators")
    if tables:
        if not isinstance(space, FiniteSpace):
            raise UsageError("permutation generators need a finite space")
        return permutation_action(space, tables, labels)
    return coordinate_action(space, maps, labels, snap=snap)


def load_action(path, space, snap: float = 1e-9) -> GroupAction:
    doc = _read_json(path)
    return action_from_dict(doc, space, snap=snap)


def _finite(obj):
    # json has no inf/nan; reports carry them as strings
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def dumps_report(report: dict) -> str:
    return json.dumps(_finite(report), indent=2) + "\n"


def write_report(report: dict, path) -> None:
    Path(path).write_text(dumps_report(report), encoding="utf-8")


def coordinate_space(name: str, dim: int) -> CoordinateSpace:
    from .metric import METRICS

    if name not in METRICS:
        raise UsageError(f"unknown metric {name!r}; choose from {sorted(METRICS)} or matrix:<path>")
    return CoordinateSpace(METRICS[name](), dim)
