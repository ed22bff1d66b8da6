"""Locating packaged reference maps by name or path."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import NotFoundError


def resolve_map_path(name_or_path: str) -> Path:
    """Filesystem path first; otherwise a packaged map name like 'demo_home'."""
    p = Path(name_or_path)
    if p.exists():
        return p
    stem = p.name if p.name.endswith(".json") else f"{p.name}.json"
    packaged = resources.files("robotiq") / "maps" / stem
    with resources.as_file(packaged) as real:
        if real.exists():
            return Path(real)
    available = sorted(f.name for f in (resources.files("robotiq") / "maps").iterdir())
    raise NotFoundError(f"no map {name_or_path!r}; packaged maps: {', '.join(available)}")
