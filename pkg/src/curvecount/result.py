"""Structured outcome of a named identity verification."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named check on one graph.

    status is "pass", "fail", or "skip" (preconditions unmet, e.g. a
    K-class identity on a positive-genus graph). ``diff`` renders
    lhs - rhs in canonical form and is the zero class iff status is
    "pass". ``elapsed_ms`` is excluded from the deterministic report
    renderings.
    """

    name: str
    graph: str
    status: str
    lhs: str = ""
    rhs: str = ""
    diff: str = ""
    detail: str = ""
    elapsed_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "name": self.name,
            "graph": self.graph,
            "status": self.status,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "diff": self.diff,
        }
        if self.detail:
            out["detail"] = self.detail
        if timings:
            out["elapsed_ms"] = self.elapsed_ms
        return out
