"""Pass/fail reports with witnesses, shared by the structure and digraph checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class KCubeError(ValueError):
    """Raised for malformed input (unknown letters, bad relators, ...)."""


class InconsistencyError(KCubeError):
    """Raised when a completion procedure meets two incompatible answers."""

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


@dataclass
class Check:
    name: str
    passed: bool
    witnesses: list = field(default_factory=list)
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "witnesses": [_jsonable(w) for w in self.witnesses],
        }


@dataclass
class ValidationReport:
    checks: list[Check] = field(default_factory=list)

    # keep reports small; one counterexample is usually enough to debug
    max_witnesses = 10

    def add(self, name: str, witnesses=(), detail: str = "") -> Check:
        witnesses = list(witnesses)
        check = Check(name, not witnesses, witnesses[: self.max_witnesses], detail)
        self.checks.append(check)
        return check

    def extend(self, other: ValidationReport) -> ValidationReport:
        self.checks.extend(other.checks)
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _jsonable(obj):
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)
