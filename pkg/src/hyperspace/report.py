from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Finding:
    """One entry of a verifier report.

    Verifiers return lists of failing findings, so an empty list means the
    check passed everywhere it was run.
    """

    check: str
    witness: Any
    residual: float
    passed: bool = False
    detail: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "check": self.check,
            "witness": _plain(self.witness),
            "residual": float(self.residual),
            "pass": bool(self.passed),
        }
        if self.detail:
            out["detail"] = _plain(self.detail)
        return out


def _plain(obj: Any) -> Any:
    # numpy scalars/arrays and tuples -> json-friendly values
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_plain(v) for v in obj]
    return obj
