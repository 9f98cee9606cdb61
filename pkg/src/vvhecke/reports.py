"""Machine-readable verification reports.

A report is deterministic given its inputs: wall-clock timings are kept on
the objects but only serialized on request.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .scalars import Cyclotomic

__all__ = ["CaseReport", "VerificationReport", "jsonable", "mismatch_record", "short"]

STATUSES = ("pass", "fail", "witness-found", "budget-exceeded", "error")


def jsonable(x):
    """Canonical JSON form of the exact values that appear in reports."""
    if isinstance(x, Cyclotomic):
        return x.to_json()
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


def short(x) -> str:
    """Compact human-readable form for tables."""
    if isinstance(x, Cyclotomic):
        return str(x.to_fraction()) if x.is_rational() else repr(x)
    return str(x)


def mismatch_record(module, lam, n, lhs, rhs) -> dict:
    return {
        "component": [jsonable(c) for c in module.coords(lam)],
        "exponent": jsonable(Fraction(n)),
        "lhs": jsonable(Cyclotomic.coerce(lhs)),
        "rhs": jsonable(Cyclotomic.coerce(rhs)),
    }


@dataclass
class CaseReport:
    name: str
    params: dict
    status: str = "pass"
    mismatches: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    compared: int = 0
    timing: float = 0.0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "witness-found")

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "name": self.name,
            "params": jsonable(self.params),
            "status": self.status,
            "compared": self.compared,
            "mismatches": self.mismatches,
            "constants": jsonable(self.constants),
            "notes": list(self.notes),
        }
        if timing:
            out["seconds"] = round(self.timing, 3)
        return out


@dataclass
class VerificationReport:
    suite: str
    cases: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.cases)

    def to_json(self, timing: bool = False) -> dict:
        return {
            "suite": self.suite,
            "ok": self.ok,
            "cases": [c.to_json(timing) for c in self.cases],
        }

    def dumps(self, timing: bool = False) -> str:
        return json.dumps(self.to_json(timing), indent=1, sort_keys=True) + "\n"

    def table(self) -> str:
        rows = [f"suite {self.suite}"]
        for c in self.cases:
            extra = ", ".join(f"{k}={short(v)}" for k, v in c.constants.items())
            rows.append(
                f"  {c.status:<15} {c.name:<40} compared={c.compared:<5} "
                f"mismatches={len(c.mismatches):<4} {c.timing:7.2f}s {extra}"
            )
        rows.append("ALL PASS" if self.ok else "FAILURES PRESENT")
        return "\n".join(rows) + "\n"
