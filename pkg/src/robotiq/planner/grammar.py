"""Rule-based command grammar: verbs over registry-resolved noun phrases.

Covers the home-service vocabulary (go to / navigate to / pick / place /
put / approach / leave / bring) joined by "and" / "then" / commas. Noun
phrases resolve against the world registries by normalized substring;
phrases that resolve to nothing pass through literally so the validator
owns the final word.
"""

from __future__ import annotations

import math
import re

from ..errors import UnparseableCommandError
from ..skills import normalize_name, resolve_registry
from ..world import WorldMap
from .catalog import FunctionCatalog
from .types import SkillCall

SUPPORTED_VERBS = [
    "go to", "navigate to", "pick [up]", "place", "put",
    "approach", "leave", "bring ... to ...", "where is / locate",
]

_CLAUSE_SPLIT = re.compile(r"\s*(?:,|;|\bthen\b|\band\s+then\b|\band\b)\s*", re.IGNORECASE)
_FILLER = re.compile(r"^\s*(?:please|now|robot|could you|can you|would you)\s+", re.IGNORECASE)

_BRING = re.compile(
    r"^(?:bring|fetch|deliver)\s+(?:the\s+|a\s+)?(?P<obj>.+?)\s+"
    r"(?:to|towards?|near)\s+(?:the\s+)?(?P<dest>.+?)\s*$",
    re.IGNORECASE,
)
_GO = re.compile(
    r"^(?:go|navigate|move|drive|head)\s+(?:to(?:wards?)?|into)\s+(?:the\s+)?(?P<loc>.+?)\s*$",
    re.IGNORECASE,
)
_PICK = re.compile(
    r"^(?:pick|grab|take)(?:\s+up)?\s+(?:the\s+|a\s+)?(?P<item>.+?)(?:\s+up)?\s*$",
    re.IGNORECASE,
)
_PLACE = re.compile(
    r"^(?:place|put|drop)(?:\s+down)?\s+(?:the\s+)?(?P<item>.+?)"
    r"(?:\s+(?:near|by|at|next\s+to|beside|down|on)\b.*)?\s*$",
    re.IGNORECASE,
)
_APPROACH = re.compile(
    r"^approach\s+(?:the\s+)?(?:marker\s+)?(?P<m>\S+?)"
    r"(?:\s+(?:at|to|within)\s+(?P<x>[0-9.]+)\s*(?:m|meters?)?)?\s*$",
    re.IGNORECASE,
)
_LEAVE = re.compile(r"^leave\b(?P<rest>.*)$", re.IGNORECASE)
_WHERE = re.compile(
    r"^(?:where\s+is|locate|find)\s+(?:the\s+)?(?P<loc>.+?)\s*\??\s*$", re.IGNORECASE
)
_NUMBER = re.compile(r"([0-9]*\.?[0-9]+)")


class RuleGrammar:
    """Deterministic text -> intents parser bound to one world snapshot."""

    def __init__(self, catalog: FunctionCatalog, world: WorldMap, leave_default: float = 0.3):
        self.catalog = catalog
        self.world = world
        self.leave_default = leave_default

    # -- noun resolution ---------------------------------------------------

    def _location(self, phrase: str) -> str:
        return resolve_registry(phrase, self.world.locations) or normalize_name(phrase)

    def _item(self, phrase: str) -> str:
        return resolve_registry(phrase, self.world.items) or normalize_name(phrase)

    def _marker(self, token: str):
        try:
            return int(token)
        except ValueError:
            markers = [m.id for m in self.world.markers]
            return markers[0] if len(markers) == 1 else normalize_name(token)

    def _location_of_item(self, item_key: str) -> str:
        """Registered location nearest to the item's map pose."""
        item = self.world.items.get(item_key)
        if item is None or not self.world.locations:
            return f"location_of_{item_key}"
        pose = item.pose
        return min(
            self.world.locations,
            key=lambda name: math.hypot(
                self.world.locations[name][0] - pose.x,
                self.world.locations[name][1] - pose.y,
            ),
        )

    # -- parsing -------------------------------------------------------------

    def parse_command(self, text: str) -> list[SkillCall]:
        if not text or not text.strip():
            raise UnparseableCommandError(text, SUPPORTED_VERBS)
        intents: list[SkillCall] = []
        clauses = [c for c in _CLAUSE_SPLIT.split(text) if c and c.strip()]
        for clause in clauses:
            clause = _FILLER.sub("", clause).strip().rstrip(".!?")
            if not clause:
                continue
            intents.extend(self._parse_clause(clause, text))
        if not intents:
            raise UnparseableCommandError(text, SUPPORTED_VERBS)
        return intents

    def _parse_clause(self, clause: str, full_text: str) -> list[SkillCall]:
        if m := _BRING.match(clause):
            item = self._item(m.group("obj"))
            dest = self._location(m.group("dest"))
            source = self._location_of_item(item)
            # Full fetch cycle: collect, back away, deliver.
            return [
                SkillCall("go_to", {"location": source}),
                SkillCall("pick", {"item": item}),
                SkillCall("leave", {"x": self.leave_default}),
                SkillCall("go_to", {"location": dest}),
                SkillCall("place", {"item": item}),
            ]
        if m := _GO.match(clause):
            return [SkillCall("go_to", {"location": self._location(m.group("loc"))})]
        if m := _APPROACH.match(clause):
            x = float(m.group("x")) if m.group("x") else self.leave_default
            return [SkillCall("approach", {"marker_id": self._marker(m.group("m")), "x": x})]
        if m := _LEAVE.match(clause):
            num = _NUMBER.search(m.group("rest") or "")
            x = float(num.group(1)) if num else self.leave_default
            return [SkillCall("leave", {"x": x})]
        if m := _WHERE.match(clause):
            return [SkillCall("get_position", {"name": self._location(m.group("loc"))})]
        if m := _PICK.match(clause):
            return [SkillCall("pick", {"item": self._item(m.group("item"))})]
        if m := _PLACE.match(clause):
            return [SkillCall("place", {"item": self._item(m.group("item"))})]
        raise UnparseableCommandError(full_text, SUPPORTED_VERBS)
