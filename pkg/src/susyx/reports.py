"""Check reports and their JSON encoding (complex numbers as ``[re, im]``)."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

import numpy as np

__all__ = ["CheckReport", "to_jsonable", "dumps", "summarize"]


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    return obj


def dumps(obj: Any) -> str:
    """Canonical single-line JSON (sorted keys) so equal content gives equal bytes."""
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"), allow_nan=True)


@dataclass(frozen=True)
class CheckReport:
    check_name: str
    params: dict = field(default_factory=dict)
    residual: float = 0.0
    tolerance: float = 0.0
    passed: bool = True

    def __post_init__(self):
        if self.passed != (self.residual <= self.tolerance):
            raise ValueError("pass flag must equal residual <= tolerance")

    @classmethod
    def make(cls, name: str, params: Mapping, residual: float, tolerance: float) -> "CheckReport":
        residual = float(residual)
        if math.isnan(residual):
            residual = math.inf
        return cls(name, dict(params), residual, float(tolerance), residual <= tolerance)

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "params": to_jsonable(self.params),
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def __str__(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.check_name} residual={self.residual:.3e} tol={self.tolerance:.1e} {dumps(self.params)}"


def summarize(reports: Iterable[CheckReport]) -> dict:
    reports = list(reports)
    failed = [r.check_name for r in reports if not r.passed]
    return {"summary": True, "total": len(reports), "passed": len(reports) - len(failed),
            "failed": len(failed), "failed_checks": sorted(set(failed))}
