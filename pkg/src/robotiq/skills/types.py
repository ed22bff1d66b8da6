"""Skill-layer domain types: robot state, arm lifecycle, results, sensors."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from ..errors import ProtocolError
from ..world import Pose2D


class ArmState(enum.Enum):
    HOME = "home"
    PRE_PICK = "pre_pick"
    PICK = "pick"
    POST_PICK = "post_pick"
    PRE_PLACE = "pre_place"
    PLACE = "place"
    POST_PLACE = "post_place"


# Legal lifecycle: Home -> PrePick -> Pick -> PostPick -> (navigate) ->
# PrePlace -> Place -> PostPlace -> Home.
_ARM_TRANSITIONS: dict[ArmState, ArmState] = {
    ArmState.HOME: ArmState.PRE_PICK,
    ArmState.PRE_PICK: ArmState.PICK,
    ArmState.PICK: ArmState.POST_PICK,
    ArmState.POST_PICK: ArmState.PRE_PLACE,
    ArmState.PRE_PLACE: ArmState.PLACE,
    ArmState.PLACE: ArmState.POST_PLACE,
    ArmState.POST_PLACE: ArmState.HOME,
}


def advance_arm(current: ArmState, target: ArmState) -> ArmState:
    """Validated single-step arm transition."""
    if _ARM_TRANSITIONS.get(current) is not target:
        raise ProtocolError(f"illegal arm transition {current.value} -> {target.value}")
    return target


class SkillStatus(enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    TIMEOUT = "timeout"


@dataclass
class RobotState:
    pose: Pose2D
    arm: ArmState = ArmState.HOME
    gripper_opening: float = 0.0
    gripper_velocity: float = 0.0
    held_item: str | None = None


@dataclass
class SkillResult:
    status: SkillStatus
    duration: float  # simulated seconds
    transcript: list[dict] = field(default_factory=list)
    reason: str | None = None

    @property
    def success(self) -> bool:
        return self.status is SkillStatus.SUCCESS


@dataclass(frozen=True)
class MarkerObservation:
    marker_id: int
    range: float
    bearing: float  # relative to robot heading, radians
    visible: bool = True


@dataclass(frozen=True)
class CameraSpec:
    max_range: float = 4.0
    half_fov: float = math.pi / 3.0


@dataclass(frozen=True)
class NoiseSpec:
    sigma_range: float = 0.005
    sigma_bearing: float = 0.01


@dataclass(frozen=True)
class SkillConfig:
    """Tunables for the skill library; distances m, angles rad, times s."""

    control_dt: float = 0.1
    cruise_v: float = 0.22
    omega_max: float = 1.5
    k_heading: float = 2.0
    goal_radius: float = 0.2
    robot_radius: float = 0.22
    skill_timeout: float = 30.0
    stop_distance: float = 0.45
    arm_phase_duration: float = 1.5
    reach_radius: float = 0.25
    reach_bearing: float = math.pi / 6.0
    place_ahead: float = 0.2
    item_radius: float = 0.03
    k_bearing: float = 1.5
    k_range: float = 0.8
    approach_tol_range: float = 0.02
    approach_tol_bearing: float = math.radians(3.0)
    marker_lost_budget: float = 1.0
    leave_default: float = 0.3
    rotate_tol: float = 0.06
    gripper_travel: float = 0.025
    gripper_v_max: float = 0.1
    gripper_a_peak: float = 1.0
    camera: CameraSpec = field(default_factory=CameraSpec)
    noise: NoiseSpec = field(default_factory=NoiseSpec)

    @classmethod
    def from_dict(cls, d: dict) -> "SkillConfig":
        d = dict(d)
        if "camera" in d and isinstance(d["camera"], dict):
            d["camera"] = CameraSpec(**d["camera"])
        if "noise" in d and isinstance(d["noise"], dict):
            d["noise"] = NoiseSpec(**d["noise"])
        return cls(**d)
