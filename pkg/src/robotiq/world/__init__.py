"""World geometry: poses, maps, raycasting, collision tests."""

from .geometry import (
    INTEGRATION_SUBSTEP,
    Pose2D,
    Quaternion,
    heading_from_quaternion,
    integrate_unicycle,
    quaternion_from_heading,
    wrap_angle,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .worldmap import (
    Circle,
    Item,
    Marker,
    Obstacle,
    Rect,
    Segment,
    WorldMap,
    collision_check,
    load_world,
    load_world_file,
    ray_cast,
    scan,
)

__all__ = [
    "INTEGRATION_SUBSTEP",
    "KERNEL_BACKEND",
    "Pose2D",
    "Quaternion",
    "Circle",
    "Segment",
    "Rect",
    "Obstacle",
    "Marker",
    "Item",
    "WorldMap",
    "wrap_angle",
    "quaternion_from_heading",
    "heading_from_quaternion",
    "integrate_unicycle",
    "ray_cast",
    "scan",
    "collision_check",
    "load_world",
    "load_world_file",
]
