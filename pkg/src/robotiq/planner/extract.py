"""Pulling a structured plan out of free-form backend text."""

from __future__ import annotations

import json
import re

from ..errors import ExtractionError
from .types import Plan, Provenance, SkillCall

_FENCE = re.compile(r"```[a-zA-Z]*\n(.*?)```", re.DOTALL)


def _steps_from_value(value) -> list[SkillCall] | None:
    if isinstance(value, dict):
        if "fn" in value:
            value = [value]
        else:
            inner = value.get("plan", value.get("steps"))
            if not isinstance(inner, list):
                return None
            value = inner
    if not isinstance(value, list) or not value:
        return None
    steps = []
    for item in value:
        if not isinstance(item, dict) or not isinstance(item.get("fn"), str):
            return None
        args = item.get("args", {})
        if not isinstance(args, dict):
            return None
        steps.append(SkillCall(fn=item["fn"], args=dict(args)))
    return steps


def _scan_candidate(text: str) -> list[SkillCall] | None:
    decoder = json.JSONDecoder()
    for i, ch in enumerate(text):
        if ch not in "[{":
            continue
        try:
            value, _ = decoder.raw_decode(text[i:])
        except json.JSONDecodeError:
            continue
        steps = _steps_from_value(value)
        if steps is not None:
            return steps
    return None


def extract_plan(raw_text: str) -> Plan:
    """First JSON plan found in the text; tolerates code fences and prose."""
    candidates = _FENCE.findall(raw_text or "")
    candidates.append(raw_text or "")
    for cand in candidates:
        steps = _scan_candidate(cand)
        if steps is not None:
            return Plan(steps=steps, provenance=Provenance(raw_output=raw_text))
    raise ExtractionError(f"no JSON plan found in backend output: {raw_text[:200]!r}")
