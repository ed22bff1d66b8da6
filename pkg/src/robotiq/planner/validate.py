"""Catalog-constrained plan validation.

Static checks (names, arity, types, reference resolution, numeric bounds)
plus a symbolic walk of the gripper state across the sequence. Rejection is
a value, never an exception; nothing unvalidated reaches the executor.
"""

from __future__ import annotations

import math

from ..skills import resolve_registry
from ..world import WorldMap
from .catalog import FunctionCatalog
from .types import Plan, ValidationReport, Violation

METERS_MAX = 10.0


def _check_meters(value) -> str | None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return f"expected a number of meters, got {value!r}"
    if not math.isfinite(value):
        return f"expected a finite number, got {value!r}"
    if not 0.0 < value <= METERS_MAX:
        return f"distance {value} outside (0, {METERS_MAX}] m"
    return None


def validate_plan(plan: Plan, catalog: FunctionCatalog, world: WorldMap) -> ValidationReport:
    violations: list[Violation] = []
    held: str | None = None

    def flag(idx: int, rule: str, message: str) -> None:
        violations.append(Violation(step=idx, rule=rule, message=message))

    for idx, step in enumerate(plan.steps):
        entry = catalog.entry(step.fn)
        if entry is None:
            flag(idx, "unknown-function", f"{step.fn!r} is not in the catalog")
            continue
        declared = {p["name"]: p["type"] for p in entry["params"]}
        missing = sorted(set(declared) - set(step.args))
        extra = sorted(set(step.args) - set(declared))
        if missing:
            flag(idx, "arity", f"{step.fn} missing argument(s): {', '.join(missing)}")
        if extra:
            flag(idx, "arity", f"{step.fn} got unexpected argument(s): {', '.join(extra)}")
        if missing or extra:
            continue

        resolved: dict = {}
        for pname, ptype in declared.items():
            value = step.args[pname]
            if ptype == "meters":
                err = _check_meters(value)
                if err:
                    rule = "numeric-bounds" if isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value) else "type"
                    flag(idx, rule, f"{step.fn}.{pname}: {err}")
            elif ptype == "location":
                if not isinstance(value, str):
                    flag(idx, "type", f"{step.fn}.{pname}: expected a location name, got {value!r}")
                elif resolve_registry(value, world.locations) is None:
                    flag(idx, "unresolvable-reference",
                         f"{step.fn}.{pname}: unknown location {value!r}")
            elif ptype == "item":
                if not isinstance(value, str):
                    flag(idx, "type", f"{step.fn}.{pname}: expected an item name, got {value!r}")
                else:
                    key = resolve_registry(value, world.items)
                    if key is None:
                        flag(idx, "unresolvable-reference",
                             f"{step.fn}.{pname}: unknown item {value!r}")
                    else:
                        resolved[pname] = key
            elif ptype == "marker_id":
                try:
                    mid = int(value)
                except (TypeError, ValueError):
                    flag(idx, "type", f"{step.fn}.{pname}: expected a marker id, got {value!r}")
                    continue
                if isinstance(value, bool):
                    flag(idx, "type", f"{step.fn}.{pname}: expected a marker id, got {value!r}")
                elif world.marker_by_id(mid) is None:
                    flag(idx, "unresolvable-reference",
                         f"{step.fn}.{pname}: unknown marker id {mid}")

        # Symbolic gripper state across the sequence.
        if step.fn == "pick" and "item" in resolved:
            if held is not None:
                flag(idx, "state-precondition",
                     f"pick({resolved['item']!r}) while already holding {held!r}")
            else:
                held = resolved["item"]
        elif step.fn == "place" and "item" in resolved:
            if held != resolved["item"]:
                holding = f"holding {held!r}" if held else "empty-handed"
                flag(idx, "state-precondition",
                     f"place({resolved['item']!r}) while {holding}")
            else:
                held = None

    return ValidationReport(violations=violations)
