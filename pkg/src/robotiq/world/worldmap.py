"""Static 2D world: obstacles, fiducial markers, named locations, items.

A `WorldMap` is immutable after load except for item state, which only the
skills layer mutates through its session-owned copy. Geometry queries go
through flat float64 arrays cached at construction so the hot kernels never
touch Python objects.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError, MapError, MapInvariantError
from . import kernels
from .geometry import Pose2D


@dataclass(frozen=True)
class Circle:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise InvalidInputError(f"circle radius must be > 0, got {self.radius}")


@dataclass(frozen=True)
class Segment:
    p1: tuple[float, float]
    p2: tuple[float, float]


@dataclass(frozen=True)
class Rect:
    min_corner: tuple[float, float]
    max_corner: tuple[float, float]

    def __post_init__(self):
        if not (self.min_corner[0] < self.max_corner[0] and self.min_corner[1] < self.max_corner[1]):
            raise InvalidInputError(
                f"rect min must be < max componentwise: {self.min_corner} vs {self.max_corner}"
            )

    def contains(self, x: float, y: float) -> bool:
        return (
            self.min_corner[0] <= x <= self.max_corner[0]
            and self.min_corner[1] <= y <= self.max_corner[1]
        )

    @property
    def diagonal(self) -> float:
        return math.hypot(
            self.max_corner[0] - self.min_corner[0], self.max_corner[1] - self.min_corner[1]
        )

    @property
    def center(self) -> tuple[float, float]:
        return (
            0.5 * (self.min_corner[0] + self.max_corner[0]),
            0.5 * (self.min_corner[1] + self.max_corner[1]),
        )


Obstacle = Circle | Segment | Rect


@dataclass(frozen=True)
class Marker:
    """Fiducial marker: pose.theta is the outward face normal."""

    id: int
    pose: Pose2D


@dataclass
class Item:
    """Movable object; exactly one of (on the map at `pose`, held) at a time."""

    pose: Pose2D
    held: bool = False


@dataclass
class WorldMap:
    bounds: Rect
    obstacles: list[Obstacle] = field(default_factory=list)
    markers: list[Marker] = field(default_factory=list)
    locations: dict[str, tuple[float, float]] = field(default_factory=dict)
    items: dict[str, Item] = field(default_factory=dict)
    start: Pose2D | None = None

    def __post_init__(self):
        violations = self._invariant_violations()
        if violations:
            raise MapInvariantError(violations)
        self._build_geometry_arrays()

    def _invariant_violations(self) -> list[str]:
        v: list[str] = []
        seen_ids: set[int] = set()
        for m in self.markers:
            if m.id in seen_ids:
                v.append(f"marker id {m.id} is not unique")
            seen_ids.add(m.id)
            if not self.bounds.contains(m.pose.x, m.pose.y):
                v.append(f"marker {m.id} outside bounds")
        for name, xy in self.locations.items():
            if not self.bounds.contains(xy[0], xy[1]):
                v.append(f"location '{name}' outside bounds")
        for name, item in self.items.items():
            if not self.bounds.contains(item.pose.x, item.pose.y):
                v.append(f"item '{name}' outside bounds")
            elif self._point_in_obstacle(item.pose.x, item.pose.y):
                v.append(f"item '{name}' inside an obstacle")
        if self.start is not None and not self.bounds.contains(self.start.x, self.start.y):
            v.append("start pose outside bounds")
        return v

    def _point_in_obstacle(self, x: float, y: float) -> bool:
        for ob in self.obstacles:
            if isinstance(ob, Circle):
                if math.hypot(x - ob.center[0], y - ob.center[1]) < ob.radius:
                    return True
            elif isinstance(ob, Rect):
                if ob.min_corner[0] < x < ob.max_corner[0] and ob.min_corner[1] < y < ob.max_corner[1]:
                    return True
            # Segments have zero area: a point is never strictly inside one.
        return False

    def _build_geometry_arrays(self):
        circles = [ob for ob in self.obstacles if isinstance(ob, Circle)]
        segments = [ob for ob in self.obstacles if isinstance(ob, Segment)]
        rects = [ob for ob in self.obstacles if isinstance(ob, Rect)]
        self._bounds_arr = np.array(
            [self.bounds.min_corner[0], self.bounds.min_corner[1],
             self.bounds.max_corner[0], self.bounds.max_corner[1]],
            dtype=np.float64,
        )
        self._circles_arr = np.array(
            [[c.center[0], c.center[1], c.radius] for c in circles], dtype=np.float64
        ).reshape(len(circles), 3)
        self._segments_arr = np.array(
            [[s.p1[0], s.p1[1], s.p2[0], s.p2[1]] for s in segments], dtype=np.float64
        ).reshape(len(segments), 4)
        self._rects_arr = np.array(
            [[r.min_corner[0], r.min_corner[1], r.max_corner[0], r.max_corner[1]] for r in rects],
            dtype=np.float64,
        ).reshape(len(rects), 4)

    def geometry_arrays(self):
        return self._bounds_arr, self._circles_arr, self._segments_arr, self._rects_arr

    @property
    def start_pose(self) -> Pose2D:
        if self.start is not None:
            return self.start
        cx, cy = self.bounds.center
        return Pose2D(cx, cy, 0.0)

    def marker_by_id(self, marker_id: int) -> Marker | None:
        for m in self.markers:
            if m.id == marker_id:
                return m
        return None

    def copy(self) -> "WorldMap":
        """Independent copy whose item states can be mutated freely."""
        return WorldMap(
            bounds=self.bounds,
            obstacles=list(self.obstacles),
            markers=list(self.markers),
            locations=dict(self.locations),
            items={name: Item(pose=it.pose, held=it.held) for name, it in self.items.items()},
            start=self.start,
        )


def ray_cast(world: WorldMap, origin: Pose2D, angle: float, r_min: float, r_max: float) -> float:
    """Distance along the ray to the nearest obstacle or bounds surface.

    Clamped into [r_min, r_max]; r_max when nothing is hit. An origin inside
    an obstacle (or outside the bounds) reads as a hit at distance zero.
    """
    if not (0.0 <= r_min < r_max):
        raise InvalidInputError(f"need 0 <= r_min < r_max, got ({r_min}, {r_max})")
    b, c, s, r = world.geometry_arrays()
    t = kernels.ray_distance(origin.x, origin.y, angle, b, c, s, r)
    return float(min(max(t, r_min), r_max))


def scan(world: WorldMap, origin: Pose2D, angles: np.ndarray, r_min: float, r_max: float) -> np.ndarray:
    """Vector `ray_cast` over many angles from one origin."""
    b, c, s, r = world.geometry_arrays()
    out = np.empty(len(angles), dtype=np.float64)
    kernels.raycast(origin.x, origin.y, np.ascontiguousarray(angles, dtype=np.float64),
                    r_min, r_max, b, c, s, r, out)
    return out


def collision_check(world: WorldMap, pose: Pose2D, robot_radius: float) -> bool:
    """True iff a disc of robot_radius at pose touches an obstacle or leaves bounds."""
    if not robot_radius > 0.0:
        raise InvalidInputError(f"robot_radius must be > 0, got {robot_radius}")
    b, c, s, r = world.geometry_arrays()
    return bool(kernels.collides(pose.x, pose.y, robot_radius, b, c, s, r))


# --- map document I/O ------------------------------------------------------

def _as_xy(value, path: str) -> tuple[float, float]:
    if (not isinstance(value, (list, tuple))) or len(value) != 2:
        raise MapError(f"{path}: expected [x, y], got {value!r}")
    try:
        return (float(value[0]), float(value[1]))
    except (TypeError, ValueError):
        raise MapError(f"{path}: expected numbers, got {value!r}") from None


def _as_pose(value, path: str) -> Pose2D:
    if (not isinstance(value, (list, tuple))) or len(value) != 3:
        raise MapError(f"{path}: expected [x, y, theta], got {value!r}")
    try:
        return Pose2D(float(value[0]), float(value[1]), float(value[2]))
    except (TypeError, ValueError):
        raise MapError(f"{path}: expected numbers, got {value!r}") from None


def _parse_obstacle(entry, path: str) -> Obstacle:
    if not isinstance(entry, dict) or "type" not in entry:
        raise MapError(f"{path}: obstacle needs a 'type' tag")
    kind = entry["type"]
    try:
        if kind == "circle":
            return Circle(center=_as_xy(entry["center"], f"{path}.center"),
                          radius=float(entry["radius"]))
        if kind == "segment":
            return Segment(p1=_as_xy(entry["p1"], f"{path}.p1"),
                           p2=_as_xy(entry["p2"], f"{path}.p2"))
        if kind == "rect":
            return Rect(min_corner=_as_xy(entry["min"], f"{path}.min"),
                        max_corner=_as_xy(entry["max"], f"{path}.max"))
    except KeyError as exc:
        raise MapError(f"{path}: missing field {exc}") from None
    except InvalidInputError as exc:
        raise MapInvariantError([f"{path}: {exc}"]) from None
    raise MapError(f"{path}.type: unknown obstacle type {kind!r}")


def load_world(document: str) -> WorldMap:
    """Parse and validate a JSON map document.

    Raises MapError with the offending line/field on parse problems, and
    MapInvariantError listing every violated invariant otherwise.
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise MapError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise MapError("map document must be a JSON object")
    if "bounds" not in doc:
        raise MapError("bounds: required key missing")
    braw = doc["bounds"]
    if not isinstance(braw, dict) or "min" not in braw or "max" not in braw:
        raise MapError("bounds: expected {'min': [x, y], 'max': [x, y]}")
    try:
        bounds = Rect(_as_xy(braw["min"], "bounds.min"), _as_xy(braw["max"], "bounds.max"))
    except InvalidInputError as exc:
        raise MapInvariantError([f"bounds: {exc}"]) from None

    obstacles = [
        _parse_obstacle(entry, f"obstacles[{i}]")
        for i, entry in enumerate(doc.get("obstacles", []))
    ]

    markers = []
    for i, entry in enumerate(doc.get("markers", [])):
        path = f"markers[{i}]"
        if not isinstance(entry, dict) or "id" not in entry or "pose" not in entry:
            raise MapError(f"{path}: expected {{'id': int, 'pose': [x, y, theta]}}")
        if not isinstance(entry["id"], int) or isinstance(entry["id"], bool):
            raise MapError(f"{path}.id: expected integer, got {entry['id']!r}")
        markers.append(Marker(id=entry["id"], pose=_as_pose(entry["pose"], f"{path}.pose")))

    locations_raw = doc.get("locations", {})
    if not isinstance(locations_raw, dict):
        raise MapError("locations: expected an object of name -> [x, y]")
    locations = {
        str(name): _as_xy(xy, f"locations.{name}") for name, xy in locations_raw.items()
    }

    items: dict[str, Item] = {}
    for i, entry in enumerate(doc.get("items", [])):
        path = f"items[{i}]"
        if not isinstance(entry, dict) or "name" not in entry or "pose" not in entry:
            raise MapError(f"{path}: expected {{'name': str, 'pose': [x, y, theta]}}")
        name = str(entry["name"])
        if name in items:
            raise MapError(f"{path}.name: duplicate item name {name!r}")
        items[name] = Item(pose=_as_pose(entry["pose"], f"{path}.pose"))

    start = _as_pose(doc["start"], "start") if "start" in doc else None

    return WorldMap(bounds=bounds, obstacles=obstacles, markers=markers,
                    locations=locations, items=items, start=start)


def load_world_file(path) -> WorldMap:
    with open(path, "r", encoding="utf-8") as fh:
        return load_world(fh.read())
