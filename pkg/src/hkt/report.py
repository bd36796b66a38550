"""Check results and their JSON form.

Residuals are written as strings: floats through ``repr`` (round-trips
exactly), exact residuals as ``"0"`` or their exact value. A check whose
``expect`` is ``"fail"`` is a negative control and counts as matching
when it fails.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exact import Exact

SCHEMA_VERSION = 1


@dataclass
class CheckResult:
    name: str
    residual: float | Exact
    tolerance: float
    passed: bool
    exact: bool = False
    witness: list | str | None = None
    expect: str = "pass"
    kind: str = "upper"  # "upper": residual < tolerance; "lower": value > tolerance

    @property
    def matches(self) -> bool:
        return self.passed == (self.expect == "pass")

    def to_dict(self) -> dict:
        res = str(self.residual) if self.exact else repr(float(self.residual))
        wit = self.witness
        if isinstance(wit, np.ndarray):
            wit = [float(v) for v in wit]
        return {
            "name": self.name,
            "residual": res,
            "tolerance": repr(float(self.tolerance)),
            "passed": bool(self.passed),
            "exact": bool(self.exact),
            "expect": self.expect,
            "kind": self.kind,
            "matches": self.matches,
            "witness": wit,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CheckResult":
        res = Exact.parse(data["residual"]) if data["exact"] else float(data["residual"])
        return cls(
            data["name"],
            res,
            float(data["tolerance"]),
            data["passed"],
            data["exact"],
            data["witness"],
            data["expect"],
            data["kind"],
        )

    def __eq__(self, other):
        if not isinstance(other, CheckResult):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def numeric(name, residual, tolerance, witness=None, expect="pass") -> CheckResult:
    """A sup-norm check: passes when ``residual < tolerance``."""
    r = float(residual)
    return CheckResult(name, r, tolerance, r < tolerance, False, witness, expect)


def exact_check(name, residual, expect="pass", witness=None) -> CheckResult:
    """An exact claim: passes when the residual is literally zero."""
    r = residual if isinstance(residual, Exact) else Exact.of(residual)
    return CheckResult(name, r, 0.0, not r, True, witness, expect)


def flag(name, ok: bool, expect="pass", exact=True, witness=None) -> CheckResult:
    """A yes/no property (residual 0 when it holds, 1 otherwise)."""
    return CheckResult(name, Exact(0 if ok else 1), 0.0, bool(ok), exact, witness, expect)


def lower_bound(name, value, threshold, witness=None, expect="pass") -> CheckResult:
    """Passes when ``value > threshold`` (positivity, transversality); the residual is the value."""
    v = float(value)
    return CheckResult(name, v, threshold, v > threshold, False, witness, expect, "lower")


@dataclass
class CheckReport:
    example: str
    checks: list[CheckResult]
    seed: int | None = None
    samples: int | None = None
    version: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.checks = sorted(self.checks, key=lambda c: c.name)

    @property
    def verdict(self) -> bool:
        """Every check matches its expectation."""
        return all(c.matches for c in self.checks)

    def max_residual(self, numeric_only: bool = True) -> float:
        vals = [abs(complex(c.residual)) if c.exact else float(c.residual) for c in self.checks
                if c.expect == "pass" and c.kind == "upper" and not (numeric_only and c.exact)]
        return max(vals, default=0.0)

    def merge(self, other: "CheckReport") -> "CheckReport":
        return CheckReport(self.example, self.checks + other.checks, self.seed, self.samples, self.version, self.params)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "example": self.example,
            "verdict": self.verdict,
            "seed": self.seed,
            "samples": self.samples,
            "version": self.version,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CheckReport":
        data = json.loads(text)
        return cls(
            data["example"],
            [CheckResult.from_dict(c) for c in data["checks"]],
            data["seed"],
            data["samples"],
            data["version"],
            data["params"],
        )

    def to_text(self) -> str:
        lines = [f"example {self.example}  seed={self.seed} samples={self.samples}"]
        width = max((len(c.name) for c in self.checks), default=10)
        for c in self.checks:
            res = str(c.residual) if c.exact else f"{float(c.residual):.3e}"
            mark = "ok" if c.matches else "MISMATCH"
            exp = "" if c.expect == "pass" else "  (expected to fail)"
            lines.append(f"  {c.name:<{width}}  {res:>12}  tol {c.tolerance:.1e}  {mark}{exp}")
        lines.append(f"verdict: {'PASS' if self.verdict else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        if not isinstance(other, CheckReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()
