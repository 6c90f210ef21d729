"""Check and report records shared by the plane checks and the suite runner."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"
EXACT, EMPIRICAL = "exact", "empirical"


def fraction_text(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return fraction_text(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item") and callable(x.item):  # numpy scalars
        return x.item()
    if hasattr(x, "as_tuple") and hasattr(x, "i"):  # coweights
        return str(x)
    return x


@dataclass
class CheckResult:
    name: str
    status: str
    kind: str = EXACT
    error: Fraction | float | None = None
    witness: dict | None = None
    ms: float | None = None

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def as_dict(self) -> dict:
        err = self.error
        if isinstance(err, (Fraction, int)) and not isinstance(err, bool):
            err = fraction_text(err)
        elif err is not None:
            err = float(err)
        return {
            "name": self.name,
            "status": self.status,
            "kind": self.kind,
            "error": err,
            "witness": _jsonable(self.witness),
            "ms": None if self.ms is None else round(float(self.ms), 3),
        }


def exact_check(name: str, error: Fraction, witness: dict | None = None) -> CheckResult:
    """Zero-tolerance result: passes iff ``error == 0``."""
    error = Fraction(error)
    return CheckResult(name, PASS if error == 0 else FAIL, EXACT, error, witness)


def skipped(name: str, reason: str, kind: str = EXACT) -> CheckResult:
    return CheckResult(name, SKIPPED, kind, None, {"reason": reason})


@dataclass
class SuiteReport:
    suite: str
    config: dict
    seed: int
    checks: list[CheckResult] = field(default_factory=list)

    def __post_init__(self):
        self.checks = sorted(self.checks, key=lambda c: c.name)

    @property
    def summary(self) -> dict:
        out = {PASS: 0, FAIL: 0, SKIPPED: 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    @property
    def ok(self) -> bool:
        return self.summary[FAIL] == 0

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "config": self.config,
            "seed": self.seed,
            "checks": [c.as_dict() for c in self.checks],
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "status", "kind", "error", "witness", "ms"])
        for c in self.checks:
            d = c.as_dict()
            w.writerow([d["name"], d["status"], d["kind"],
                        "" if d["error"] is None else d["error"],
                        "" if d["witness"] is None else json.dumps(d["witness"], sort_keys=True),
                        "" if d["ms"] is None else d["ms"]])
        return buf.getvalue()
