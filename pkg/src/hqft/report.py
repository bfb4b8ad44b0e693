"""Pass/fail records for axiom and identity checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .exactlin import ExactMatrix, matrix_to_json


@dataclass(frozen=True)
class Entry:
    check: str
    instance: tuple
    passed: bool
    lhs: ExactMatrix | None = None
    rhs: ExactMatrix | None = None
    note: str = ""

    def sort_key(self):
        return (self.check, tuple(str(x) for x in self.instance))

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "check": self.check,
            "instance": [str(x) for x in self.instance],
            "pass": self.passed,
        }
        if self.note:
            out["note"] = self.note
        if not self.passed:
            if self.lhs is not None:
                out["lhs"] = matrix_to_json(self.lhs)
            if self.rhs is not None:
                out["rhs"] = matrix_to_json(self.rhs)
        return out


@dataclass
class Report:
    entries: list[Entry] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)

    def add(self, check: str, instance, passed: bool, lhs=None, rhs=None, note: str = "") -> bool:
        self.entries.append(Entry(check, tuple(instance), bool(passed),
                                  None if passed else lhs, None if passed else rhs, note))
        return passed

    def expect_equal(self, check: str, instance, lhs: ExactMatrix, rhs: ExactMatrix) -> bool:
        return self.add(check, instance, lhs == rhs, lhs, rhs)

    def extend(self, other: Report) -> Report:
        self.entries.extend(other.entries)
        self.meta.update(other.meta)
        return self

    def sorted(self) -> Report:
        return Report(sorted(self.entries, key=Entry.sort_key), dict(self.meta))

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def failures(self) -> list[Entry]:
        return [e for e in self.entries if not e.passed]

    def checks(self) -> set[str]:
        return {e.check for e in self.entries}

    def of(self, check: str) -> list[Entry]:
        return [e for e in self.entries if e.check == check]

    def summary(self) -> dict[str, tuple[int, int]]:
        """check id -> (passed, total)"""
        out: dict[str, list[int]] = {}
        for e in self.entries:
            c = out.setdefault(e.check, [0, 0])
            c[0] += e.passed
            c[1] += 1
        return {k: (v[0], v[1]) for k, v in sorted(out.items())}

    def to_json(self) -> dict[str, Any]:
        rep = self.sorted()
        return {
            "pass": rep.passed,
            "meta": rep.meta,
            "summary": {k: {"passed": p, "total": t} for k, (p, t) in rep.summary().items()},
            "entries": [e.to_json() for e in rep.entries],
        }

    def format_summary(self) -> str:
        lines = []
        for check, (p, t) in self.summary().items():
            mark = "ok  " if p == t else "FAIL"
            lines.append(f"{mark} {check}: {p}/{t}")
        lines.append("PASS" if self.passed else f"FAIL ({len(self.failures)} failing instances)")
        return "\n".join(lines)
