"""Function catalog handed to backends and the validator."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import CatalogError
from ..skills import MANIFEST, SKILL_BINDINGS, registries_snapshot
from ..world import WorldMap


@dataclass
class FunctionCatalog:
    entries: list[dict] = field(default_factory=lambda: [dict(e) for e in MANIFEST])
    registries: dict = field(default_factory=lambda: {"locations": [], "items": [], "markers": []})

    def entry(self, name: str) -> dict | None:
        for e in self.entries:
            if e["name"] == name:
                return e
        return None

    def manifest_json(self) -> str:
        """The exact catalog document embedded in prompts."""
        return json.dumps(self.entries, indent=2)


def build_catalog(world: WorldMap, entries: list[dict] | None = None) -> FunctionCatalog:
    """Catalog snapshot for a world; verifies every entry has a skill binding."""
    entries = [dict(e) for e in (entries if entries is not None else MANIFEST)]
    names = [e["name"] for e in entries]
    if len(set(names)) != len(names):
        raise CatalogError(f"duplicate catalog entries in {names}")
    unbound = [n for n in names if n not in SKILL_BINDINGS]
    if unbound:
        raise CatalogError(f"catalog entries without a skill binding: {unbound}")
    return FunctionCatalog(entries=entries, registries=registries_snapshot(world))
