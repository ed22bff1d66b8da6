"""Plan representation shared across the compiler pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class SkillCall:
    fn: str
    args: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"fn": self.fn, "args": dict(self.args)}


@dataclass
class Provenance:
    backend_id: str = ""
    raw_output: str = ""
    compile_seconds: float = 0.0
    retries: int = 0


@dataclass
class Plan:
    steps: list[SkillCall]
    provenance: Provenance = field(default_factory=Provenance)

    def to_dict(self) -> dict:
        return {"steps": [s.to_dict() for s in self.steps]}


@dataclass(frozen=True)
class Violation:
    step: int
    rule: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "reject" if self.violations else "accept"

    @property
    def accepted(self) -> bool:
        return not self.violations

    def describe(self) -> str:
        if self.accepted:
            return "accept"
        return "; ".join(f"step {v.step}: [{v.rule}] {v.message}" for v in self.violations)
