"""Check results and suite reports, with a canonical JSON form.

Report documents are deterministic: key order is fixed, elapsed times are
kept out of the JSON form, and witnesses are always the lexicographically
minimal counterexample, so two runs over the same inputs serialize to
identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .spaces import Witness


@dataclass
class CheckResult:
    name: str
    verdict: str  # pass | fail | skipped
    witness: Witness | None = None
    reason: str = ""
    pairs_examined: int = 0
    elapsed: float = 0.0
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_doc(self) -> dict:
        doc = {"name": self.name, "verdict": self.verdict}
        if self.witness is not None:
            doc["witness"] = self.witness.to_doc()
        if self.reason:
            doc["reason"] = self.reason
        if self.info:
            doc["info"] = self.info
        doc["pairs_examined"] = self.pairs_examined
        return doc


@dataclass
class SuiteReport:
    structure: str
    mode: str
    checks: list[CheckResult]

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def all_passed(self) -> bool:
        return all(c.verdict != "fail" for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.verdict == "fail"]

    def to_doc(self) -> dict:
        return {
            "structure": self.structure,
            "mode": self.mode,
            "checks": [c.to_doc() for c in self.checks],
        }


def report_to_json(doc: dict) -> str:
    """Canonical serialization; parsing and re-serializing is byte-stable."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
