"""Independent oracles used by the unit and acceptance suites.

These deliberately avoid the library's raycast/intersection code paths:
the ray oracle marches in small increments testing point containment only.
"""

from __future__ import annotations

import math

import numpy as np

from robotiq.world import Circle, Pose2D, Rect, Segment, WorldMap

MARCH_STEP = 1e-4  # 0.1 mm


def _point_segment_dist(px, py, seg: Segment) -> np.ndarray:
    x1, y1 = seg.p1
    x2, y2 = seg.p2
    ex, ey = x2 - x1, y2 - y1
    ln = ex * ex + ey * ey
    if ln == 0.0:
        return np.hypot(px - x1, py - y1)
    u = np.clip(((px - x1) * ex + (py - y1) * ey) / ln, 0.0, 1.0)
    return np.hypot(px - (x1 + u * ex), py - (y1 + u * ey))


def marching_ray_oracle(world: WorldMap, origin: Pose2D, angle: float, r_max: float) -> float:
    """First marched distance whose sample point is 'in collision'.

    Containment: outside bounds, inside a circle/rect, or within half a step
    of a segment (segments have zero width, so proximity stands in for
    crossing). Returns r_max when the march never collides.
    """
    ts = np.arange(0.0, r_max + MARCH_STEP, MARCH_STEP)
    px = origin.x + ts * math.cos(angle)
    py = origin.y + ts * math.sin(angle)

    hit = (
        (px < world.bounds.min_corner[0])
        | (px > world.bounds.max_corner[0])
        | (py < world.bounds.min_corner[1])
        | (py > world.bounds.max_corner[1])
    )
    for ob in world.obstacles:
        if isinstance(ob, Circle):
            hit |= np.hypot(px - ob.center[0], py - ob.center[1]) <= ob.radius
        elif isinstance(ob, Rect):
            hit |= (
                (px >= ob.min_corner[0])
                & (px <= ob.max_corner[0])
                & (py >= ob.min_corner[1])
                & (py <= ob.max_corner[1])
            )
        elif isinstance(ob, Segment):
            hit |= _point_segment_dist(px, py, ob) <= MARCH_STEP / 2.0
    idx = np.argmax(hit)
    if not hit[idx]:
        return r_max
    return float(min(ts[idx], r_max))


def random_world(rng: np.random.Generator, n_obstacles: int = 6) -> WorldMap:
    """Obstacle soup in a 6x5 room, mixing all three shape kinds."""
    obstacles = []
    for _ in range(n_obstacles):
        kind = rng.integers(0, 3)
        cx = rng.uniform(0.5, 5.5)
        cy = rng.uniform(0.5, 4.5)
        if kind == 0:
            obstacles.append(Circle((cx, cy), rng.uniform(0.1, 0.5)))
        elif kind == 1:
            ang = rng.uniform(0, 2 * math.pi)
            ln = rng.uniform(0.3, 1.5)
            obstacles.append(
                Segment((cx, cy), (cx + ln * math.cos(ang), cy + ln * math.sin(ang)))
            )
        else:
            w = rng.uniform(0.1, 0.8)
            h = rng.uniform(0.1, 0.8)
            obstacles.append(Rect((cx - w / 2, cy - h / 2), (cx + w / 2, cy + h / 2)))
    return WorldMap(bounds=Rect((0.0, 0.0), (6.0, 5.0)), obstacles=obstacles)


def free_origin(rng: np.random.Generator, world: WorldMap) -> Pose2D:
    """Origin inside bounds and not inside/too close to any obstacle."""
    from robotiq.world import collision_check

    for _ in range(1000):
        pose = Pose2D(rng.uniform(0.05, 5.95), rng.uniform(0.05, 4.95), rng.uniform(-math.pi, math.pi))
        if not collision_check(world, pose, 0.01):
            return pose
    raise RuntimeError("could not sample a free origin")
