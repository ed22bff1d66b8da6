"""Machine-readable skill catalog: the plan vocabulary.

The manifest below is the exact document embedded in planner prompts and
consumed by the plan validator; every entry must have an executable binding
on `SkillRuntime` (checked at import by the planner).
"""

from __future__ import annotations

from ..world import WorldMap

MANIFEST: list[dict] = [
    {
        "name": "go_to",
        "params": [{"name": "location", "type": "location"}],
        "doc": "Drive the robot to a named location.",
    },
    {
        "name": "approach",
        "params": [
            {"name": "marker_id", "type": "marker_id"},
            {"name": "x", "type": "meters"},
        ],
        "doc": "Servo toward a fiducial marker and stop x meters from it.",
    },
    {
        "name": "leave",
        "params": [{"name": "x", "type": "meters"}],
        "doc": "Move at least x meters away from the current spot.",
    },
    {
        "name": "pick",
        "params": [{"name": "item", "type": "item"}],
        "doc": "Pick up a nearby item with the arm.",
    },
    {
        "name": "place",
        "params": [{"name": "item", "type": "item"}],
        "doc": "Place the held item just ahead of the robot.",
    },
    {
        "name": "get_position",
        "params": [{"name": "name", "type": "location"}],
        "doc": "Look up the coordinates of a named location.",
    },
]

# Skill name -> SkillRuntime method name (identity today, but explicit so the
# catalog-closure check cannot silently drift).
SKILL_BINDINGS: dict[str, str] = {entry["name"]: entry["name"] for entry in MANIFEST}


def registries_snapshot(world: WorldMap) -> dict:
    return {
        "locations": sorted(world.locations),
        "items": sorted(world.items),
        "markers": sorted(m.id for m in world.markers),
    }
