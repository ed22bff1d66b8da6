"""Robot library suite: navigation, marker servoing, pick & place."""

from .catalog import MANIFEST, SKILL_BINDINGS, registries_snapshot
from .gripper import GripperProfile, GripperSample, gripper_trajectory
from .runtime import (
    FallbackNavigator,
    PolicyNavigator,
    SkillRuntime,
    get_position,
    normalize_name,
    resolve_registry,
    sense_markers,
)
from .types import (
    ArmState,
    CameraSpec,
    MarkerObservation,
    NoiseSpec,
    RobotState,
    SkillConfig,
    SkillResult,
    SkillStatus,
    advance_arm,
)

__all__ = [
    "MANIFEST",
    "SKILL_BINDINGS",
    "registries_snapshot",
    "GripperProfile",
    "GripperSample",
    "gripper_trajectory",
    "FallbackNavigator",
    "PolicyNavigator",
    "SkillRuntime",
    "get_position",
    "normalize_name",
    "resolve_registry",
    "sense_markers",
    "ArmState",
    "CameraSpec",
    "MarkerObservation",
    "NoiseSpec",
    "RobotState",
    "SkillConfig",
    "SkillResult",
    "SkillStatus",
    "advance_arm",
]
