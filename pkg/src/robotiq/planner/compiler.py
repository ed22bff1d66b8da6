"""The compile pipeline: prompt -> backend -> extraction -> validation.

External backends get one validation-feedback retry; the rule backend is
deterministic, so a rejection there is final. `t_llm` covers the whole
pipeline through validation (the backend call dominates it for external
models).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from ..errors import (
    BackendError,
    CompileError,
    ExtractionError,
    UnparseableCommandError,
)
from ..world import WorldMap
from .backends import PlannerBackend, RuleBasedBackend, call_backend
from .catalog import FunctionCatalog
from .extract import extract_plan
from .prompt import build_prompt, build_retry_prompt
from .types import Plan, ValidationReport
from .validate import validate_plan


@dataclass
class CompileResult:
    plan: Plan
    t_llm: float
    report: ValidationReport


def compile_command(
    user_text: str,
    backend: PlannerBackend,
    catalog: FunctionCatalog,
    world: WorldMap,
    world_summary: str = "",
    retries: int = 1,
    template: str | None = None,
) -> CompileResult:
    """Turn a command into a validated Plan or raise CompileError(stage=...)."""
    t0 = time.perf_counter()
    external = not isinstance(backend, RuleBasedBackend)
    prompt = build_prompt(catalog, user_text, world_summary, template=template) if external else ""

    def generate(current_prompt: str) -> str:
        try:
            raw, _ = call_backend(backend, current_prompt, user_text=user_text)
            return raw
        except UnparseableCommandError as exc:
            raise CompileError("parse", str(exc)) from exc
        except BackendError as exc:
            raise CompileError("backend", str(exc)) from exc

    attempts = 1 + (retries if external else 0)
    raw = generate(prompt)
    used_retries = 0
    while True:
        try:
            plan = extract_plan(raw)
        except ExtractionError as exc:
            if used_retries < attempts - 1:
                used_retries += 1
                raw = generate(build_retry_prompt(prompt, raw, "output was not a JSON plan"))
                continue
            raise CompileError("extract", str(exc)) from exc
        report = validate_plan(plan, catalog, world)
        if report.accepted:
            break
        if used_retries < attempts - 1:
            used_retries += 1
            raw = generate(build_retry_prompt(prompt, raw, report.describe()))
            continue
        raise CompileError(
            "validate",
            f"plan rejected: {report.describe()}",
            violations=[v.__dict__ for v in report.violations],
        )

    plan.provenance.backend_id = backend.id
    plan.provenance.retries = used_retries
    plan.provenance.compile_seconds = time.perf_counter() - t0
    return CompileResult(plan=plan, t_llm=plan.provenance.compile_seconds, report=report)
