"""Structured pass/fail reports shared by the checkers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    witness: Any = None

    def to_dict(self) -> dict:
        d = {"assertion": self.name, "status": "pass" if self.passed else "fail"}
        if self.detail:
            d["detail"] = self.detail
        if not self.passed and self.witness is not None:
            d["witness"] = _jsonable(self.witness)
        return d


@dataclass
class Report:
    """A titled list of checks; ``passed`` iff every check passed."""

    title: str
    checks: list[Check] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, detail: str = "", witness: Any = None) -> bool:
        self.checks.append(Check(name, bool(passed), detail, witness))
        return bool(passed)

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.detail, c.witness))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            **{k: _jsonable(v) for k, v in self.meta.items()},
            "verdict": "pass" if self.passed else "fail",
            "checks": [c.to_dict() for c in self.checks],
        }

    def __str__(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            tag = "ok  " if c.passed else "FAIL"
            line = f"  [{tag}] {c.name}"
            if c.detail:
                line += f": {c.detail}"
            if not c.passed and c.witness is not None:
                line += f" (witness {_jsonable(c.witness)})"
            lines.append(line)
        return "\n".join(lines)


def _jsonable(x):
    from fractions import Fraction
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    if hasattr(x, "tolist"):
        return _jsonable(x.tolist())
    return str(x)
