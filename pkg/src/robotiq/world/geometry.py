"""Planar poses, heading/quaternion conversions, and unicycle integration.

Angle convention: radians, wrapped to the half-open interval (-pi, pi].
Positive headings are counterclockwise from the +x axis of the world frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InvalidInputError
from . import kernels

TWO_PI = 2.0 * math.pi

# Internal integration sub-step cap, seconds.
INTEGRATION_SUBSTEP = 1e-3


def wrap_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    w = math.remainder(theta, TWO_PI)
    if w <= -math.pi:
        w += TWO_PI
    return w


@dataclass(frozen=True)
class Pose2D:
    """Robot configuration (x, y, heading); heading always in (-pi, pi]."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    def distance_to(self, point: tuple[float, float]) -> float:
        return math.hypot(point[0] - self.x, point[1] - self.y)


@dataclass(frozen=True)
class Quaternion:
    """Planar-motion quaternion: qx = qy = 0 for pure headings."""

    qx: float
    qy: float
    qz: float
    qw: float

    def norm(self) -> float:
        return math.sqrt(self.qx**2 + self.qy**2 + self.qz**2 + self.qw**2)


def quaternion_from_heading(r_h: float) -> Quaternion:
    """Unit quaternion for a planar heading: [0, 0, sin(h/2), cos(h/2)]."""
    if not math.isfinite(r_h):
        raise InvalidInputError(f"heading must be finite, got {r_h!r}")
    return Quaternion(0.0, 0.0, math.sin(r_h / 2.0), math.cos(r_h / 2.0))


def heading_from_quaternion(q: Quaternion) -> float:
    """Yaw of a quaternion: atan2(2(qw*qz + qx*qy), 1 - 2(qy^2 + qz^2))."""
    n = q.norm()
    if n <= 0.0 or not math.isfinite(n):
        raise InvalidInputError("quaternion must have nonzero finite norm")
    qx, qy, qz, qw = q.qx / n, q.qy / n, q.qz / n, q.qw / n
    return wrap_angle(math.atan2(2.0 * (qw * qz + qx * qy), 1.0 - 2.0 * (qy * qy + qz * qz)))


def integrate_unicycle(pose: Pose2D, v: float, omega: float, dt: float) -> Pose2D:
    """Advance a unicycle pose by dt seconds of constant (v, omega).

    Sub-steps internally so no single step spans more than 1 ms of simulated
    time; converges to the constant-twist arc well below 1e-6 m at robot
    speeds.
    """
    vals = (pose.x, pose.y, pose.theta, v, omega, dt)
    if not all(math.isfinite(a) for a in vals):
        raise InvalidInputError(f"non-finite integration input: {vals!r}")
    if dt <= 0.0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    x, y, theta = kernels.integrate(pose.x, pose.y, pose.theta, v, omega, dt, INTEGRATION_SUBSTEP)
    return Pose2D(x, y, wrap_angle(theta))
