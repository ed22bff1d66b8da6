"""Rest-to-rest gripper finger trajectories.

Trapezoidal velocity profile: constant +/-a_peak ramps around an optional
cruise phase, degrading to a triangular profile for short strokes. The
reference direction runs from the gripper center outward, so closing moves
the position toward zero and opening away from it. Effort is identically
zero: the fingers are position-driven, never force-driven.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import InvalidInputError


@dataclass(frozen=True)
class GripperSample:
    t: float
    position: float
    velocity: float
    acceleration: float
    effort: float = 0.0


@dataclass
class GripperProfile:
    direction: str  # "open" | "close"
    travel: float
    samples: list[GripperSample] = field(default_factory=list)

    @property
    def duration(self) -> float:
        return self.samples[-1].t if self.samples else 0.0

    def position_at(self, t: float) -> float:
        if not self.samples:
            return 0.0
        if t <= self.samples[0].t:
            return self.samples[0].position
        for a, b in zip(self.samples, self.samples[1:]):
            if t <= b.t:
                if b.t == a.t:
                    return b.position
                u = (t - a.t) / (b.t - a.t)
                return a.position + u * (b.position - a.position)
        return self.samples[-1].position

    def velocity_at(self, t: float) -> float:
        if not self.samples or t <= self.samples[0].t or t >= self.samples[-1].t:
            return 0.0
        for a, b in zip(self.samples, self.samples[1:]):
            if t <= b.t:
                if b.t == a.t:
                    return b.velocity
                u = (t - a.t) / (b.t - a.t)
                return a.velocity + u * (b.velocity - a.velocity)
        return 0.0


def _phase_times(travel: float, a_peak: float, v_max: float) -> tuple[float, float, float]:
    """(ramp time, cruise time, cruise speed)."""
    if v_max * v_max / a_peak >= travel:
        t_ramp = math.sqrt(travel / a_peak)
        return t_ramp, 0.0, a_peak * t_ramp
    t_ramp = v_max / a_peak
    cruise_dist = travel - v_max * v_max / a_peak
    return t_ramp, cruise_dist / v_max, v_max


def gripper_trajectory(
    direction: str,
    travel: float,
    a_peak: float,
    v_max: float = 0.1,
    dt: float = 0.005,
) -> GripperProfile:
    """Sampled finger trajectory covering exactly `travel` meters.

    The sample grid includes the exact phase boundaries, so the velocity
    series is piecewise linear through its kinks and trapezoidal
    integration reproduces the displacement to float precision.
    """
    if direction not in ("open", "close"):
        raise InvalidInputError(f"direction must be 'open' or 'close', got {direction!r}")
    if not (travel > 0 and a_peak > 0 and v_max > 0 and dt > 0):
        raise InvalidInputError("travel, a_peak, v_max, dt must all be positive")

    t_ramp, t_cruise, v_c = _phase_times(travel, a_peak, v_max)
    t1, t2, total = t_ramp, t_ramp + t_cruise, 2 * t_ramp + t_cruise

    ts = sorted({round(k * dt, 12) for k in range(int(total / dt) + 1)} | {t1, t2, total})
    ts = [t for t in ts if t <= total + 1e-12]

    samples = []
    for t in ts:
        if t < t1:
            s = 0.5 * a_peak * t * t
            v = a_peak * t
            a = a_peak
        elif t < t2:
            s = 0.5 * a_peak * t1 * t1 + v_c * (t - t1)
            v = v_c
            a = 0.0
        else:
            tr = total - t
            s = travel - 0.5 * a_peak * tr * tr
            v = a_peak * tr
            a = -a_peak
        if direction == "close":
            samples.append(GripperSample(t=t, position=travel - s, velocity=-v, acceleration=-a))
        else:
            samples.append(GripperSample(t=t, position=s, velocity=v, acceleration=a))
    return GripperProfile(direction=direction, travel=travel, samples=samples)
