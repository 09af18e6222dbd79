"""Pass/fail reports with polynomial witnesses, serialisable to JSON."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Witness:
    tuple: tuple  # 0-based generator indices
    lambda_assignment: str
    difference: tuple  # PolyVector

    def to_json(self) -> dict:
        return {
            "tuple": list(self.tuple),
            "lambda_assignment": self.lambda_assignment,
            "difference": [str(p) for p in self.difference],
        }

    def describe(self) -> str:
        zero_based = "(" + ",".join(str(i) for i in self.tuple) + ")"
        one_based = "(" + ",".join(str(i + 1) for i in self.tuple) + ")"
        diff = "[" + ", ".join(str(p) for p in self.difference) + "]"
        return f"at {zero_based} [1-based {one_based}], {self.lambda_assignment}: difference {diff}"


@dataclass
class Report:
    check: str
    passed: bool
    seed: int = 0
    witness: Witness | None = None
    millis: int = 0
    inputs: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self, timing: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "check": self.check,
            "status": self.status,
            "seed": self.seed,
            "witness": self.witness.to_json() if self.witness else None,
            "millis": self.millis if timing else 0,
        }
        if self.inputs:
            out["inputs"] = _jsonable(self.inputs)
        if self.details:
            out["details"] = _jsonable(self.details)
        return out

    def line(self) -> str:
        text = f"{self.status.upper():4s} {self.check}"
        if self.details.get("summary"):
            text += f" ({self.details['summary']})"
        if self.witness is not None:
            text += "\n     " + self.witness.describe()
        return text


IdentityReport = Report


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)
