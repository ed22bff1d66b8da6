"""Skill execution: the high-level robot functions the plan compiler targets.

A `SkillRuntime` owns one robot in one mutable world copy and a simulated
clock. Every control period it can be cancelled, it never commits a pose
that collides, and it reports per-skill transcripts for streaming and
verification. Skills time out after `SkillConfig.skill_timeout` simulated
seconds.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from ..env import (
    DiscreteSpec,
    EnvConfig,
    EpisodeContext,
    discrete_actions,
    goal_bearing,
    heading_error,
    observe,
)
from ..errors import CatalogError, ProtocolError
from ..rl.policy import PolicyParams, mean_action
from ..world import Pose2D, WorldMap, collision_check, integrate_unicycle, ray_cast, scan, wrap_angle
from .gripper import gripper_trajectory
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


def normalize_name(name: str) -> str:
    """Registry-lookup normalization: case, surrounding space, separators."""
    return "_".join(str(name).strip().lower().replace("-", " ").replace("_", " ").split())


def resolve_registry(name: str, registry: dict) -> str | None:
    """Exact normalized match, else unique substring containment."""
    norm = normalize_name(name)
    by_norm = {normalize_name(k): k for k in registry}
    if norm in by_norm:
        return by_norm[norm]
    partial = [k for nk, k in by_norm.items() if norm in nk or nk in norm]
    if len(partial) == 1:
        return partial[0]
    return None


def get_position(world: WorldMap, name: str) -> tuple[float, float]:
    """Coordinates of a registered location name (normalized lookup)."""
    key = resolve_registry(name, world.locations)
    if key is None:
        known = ", ".join(sorted(world.locations)) or "(none)"
        raise CatalogError(f"unknown location {name!r}; known locations: {known}")
    return world.locations[key]


def sense_markers(
    world: WorldMap,
    pose: Pose2D,
    camera: CameraSpec,
    noise: NoiseSpec,
    rng: np.random.Generator,
) -> list[MarkerObservation]:
    """Markers in range, inside the camera FOV, and not occluded.

    Range/bearing carry Gaussian noise per `noise`; occlusion is tested by
    casting a ray at the marker and checking nothing is hit first.
    """
    out = []
    for marker in world.markers:
        dx = marker.pose.x - pose.x
        dy = marker.pose.y - pose.y
        dist = math.hypot(dx, dy)
        if dist > camera.max_range or dist < 1e-9:
            continue
        world_angle = math.atan2(dy, dx)
        bearing = wrap_angle(world_angle - pose.theta)
        if abs(bearing) > camera.half_fov:
            continue
        hit = ray_cast(world, pose, world_angle, 0.0, camera.max_range)
        if hit < dist - 1e-6:
            continue  # something in the way
        r = dist + (rng.normal(0.0, noise.sigma_range) if noise.sigma_range > 0 else 0.0)
        b = bearing + (rng.normal(0.0, noise.sigma_bearing) if noise.sigma_bearing > 0 else 0.0)
        r = min(max(r, 0.0), camera.max_range)
        b = min(max(b, -camera.half_fov), camera.half_fov)
        out.append(MarkerObservation(marker_id=marker.id, range=r, bearing=b))
    return out


# --- navigators --------------------------------------------------------------

class FallbackNavigator:
    """Proportional heading controller with stop-on-obstacle.

    Drives at cruise speed steering toward the goal bearing; when the front
    arc is blocked closer than the goal, it stops and rotates toward the
    freer side (the turn direction is held until the front clears).
    """

    collision_is_failure = False  # reactive controller: hold and re-plan instead

    def __init__(self, cfg: SkillConfig):
        self.cfg = cfg
        self._turn_dir = 1.0

    def begin(self, world: WorldMap, pose: Pose2D, goal: tuple[float, float]) -> None:
        self._turn_dir = 1.0

    def act(self, world: WorldMap, pose: Pose2D, goal: tuple[float, float]) -> tuple[float, float]:
        cfg = self.cfg
        dist = pose.distance_to(goal)
        phi = heading_error(goal_bearing(pose, goal), pose.theta) if dist > 1e-9 else 0.0
        cone = pose.theta + np.linspace(-0.7, 0.7, 9)
        ranges = scan(world, pose, cone, 0.0, 2.0)
        front_min = float(ranges.min())
        if front_min < cfg.stop_distance and front_min < dist:
            side = pose.theta + np.array([math.pi / 2, -math.pi / 2])
            left, right = scan(world, pose, side, 0.0, 2.0)
            if front_min < cfg.stop_distance * 0.8:
                # Committed turn: re-pick the freer side only when deeply blocked.
                self._turn_dir = 1.0 if left >= right else -1.0
            return 0.0, self._turn_dir * cfg.omega_max
        omega = max(-cfg.omega_max, min(cfg.omega_max, cfg.k_heading * phi))
        return cfg.cruise_v, omega


class PolicyNavigator:
    """Frozen navigation policy driving go_to through its trained MDP view."""

    collision_is_failure = True  # mirror the MDP terminal semantics

    def __init__(self, params: PolicyParams, env_cfg: EnvConfig):
        self.params = params
        self.env_cfg = env_cfg
        if isinstance(env_cfg.action, DiscreteSpec):
            self._omegas = discrete_actions(env_cfg.action.n_actions, env_cfg.action.omega_max)
        else:
            self._omegas = None
        self._ctx: EpisodeContext | None = None

    def begin(self, world: WorldMap, pose: Pose2D, goal: tuple[float, float]) -> None:
        self._ctx = EpisodeContext(goal=goal, start_pose=pose,
                                   d_goal=max(pose.distance_to(goal), 1e-6))

    def act(self, world: WorldMap, pose: Pose2D, goal: tuple[float, float]) -> tuple[float, float]:
        obs = observe(world, pose, self._ctx, self.env_cfg)
        a = mean_action(self.params, obs.as_vector())
        if self._omegas is not None:
            omega = self._omegas[int(a)]
        else:
            spec = self.env_cfg.action
            omega = float(min(max(a, spec.omega_min), spec.omega_max))
        return self.env_cfg.v, omega


# --- the runtime -------------------------------------------------------------

@dataclass
class _Run:
    """Bookkeeping for one skill invocation."""

    t0: float
    transcript: list[dict]


class SkillRuntime:
    """Sequential skill executor owning robot state, world copy, and clock."""

    def __init__(
        self,
        world: WorldMap,
        cfg: SkillConfig | None = None,
        navigator=None,
        seed: int | None = None,
        start_pose: Pose2D | None = None,
        cancel_event: threading.Event | None = None,
    ):
        self.world = world.copy()
        self.cfg = cfg or SkillConfig()
        self.navigator = navigator or FallbackNavigator(self.cfg)
        self.rng = np.random.default_rng(seed)
        self.state = RobotState(pose=start_pose or self.world.start_pose)
        self.clock = 0.0
        self.cancel_event = cancel_event
        self.tick_listeners: list = []
        self.last_approach_heading: float | None = None
        if collision_check(self.world, self.state.pose, self.cfg.robot_radius):
            raise ProtocolError(f"start pose {self.state.pose} is in collision")

    # -- plumbing --------------------------------------------------------

    def snapshot(self) -> dict:
        s = self.state
        return {
            "t": self.clock,
            "pose": [s.pose.x, s.pose.y, s.pose.theta],
            "arm": s.arm.value,
            "gripper_opening": s.gripper_opening,
            "gripper_velocity": s.gripper_velocity,
            "held_item": s.held_item,
        }

    def _cancelled(self) -> bool:
        return self.cancel_event is not None and self.cancel_event.is_set()

    def _begin(self) -> _Run:
        return _Run(t0=self.clock, transcript=[self.snapshot()])

    def _tick(self, run: _Run, new_pose: Pose2D | None = None) -> None:
        """One control period: commit motion, advance time, notify."""
        if new_pose is not None:
            self.state.pose = new_pose
            if self.state.held_item is not None:
                self.world.items[self.state.held_item].pose = new_pose
        self.clock += self.cfg.control_dt
        snap = self.snapshot()
        run.transcript.append(snap)
        for fn in self.tick_listeners:
            fn(snap)

    def _finish(self, run: _Run, status: SkillStatus, reason: str | None = None) -> SkillResult:
        return SkillResult(status=status, duration=self.clock - run.t0,
                           transcript=run.transcript, reason=reason)

    def _guard(self, run: _Run) -> SkillResult | None:
        """Cancellation and timeout checks, evaluated every control period."""
        if self._cancelled():
            return self._finish(run, SkillStatus.FAILURE, "cancelled")
        if self.clock - run.t0 >= self.cfg.skill_timeout:
            return self._finish(run, SkillStatus.TIMEOUT, "timeout")
        return None

    def _try_move(self, run: _Run, v: float, omega: float) -> bool:
        """Integrate one period; refuse (and report) moves that would collide."""
        candidate = integrate_unicycle(self.state.pose, v, omega, self.cfg.control_dt)
        if collision_check(self.world, candidate, self.cfg.robot_radius):
            return False
        self._tick(run, candidate)
        return True

    def _run_arm_phase(self, run: _Run, target: ArmState, gripper=None) -> None:
        """Advance the arm FSM and consume the phase duration on the clock.

        `gripper` optionally carries a finger profile replayed across the
        phase; the robot base holds still throughout.
        """
        self.state.arm = advance_arm(self.state.arm, target)
        steps = max(1, int(round(self.cfg.arm_phase_duration / self.cfg.control_dt)))
        for i in range(steps):
            t_in = (i + 1) * self.cfg.control_dt
            if gripper is not None:
                self.state.gripper_opening = gripper.position_at(t_in)
                self.state.gripper_velocity = gripper.velocity_at(t_in)
            self._tick(run)
        self.state.gripper_velocity = 0.0

    def sense(self) -> list[MarkerObservation]:
        return sense_markers(self.world, self.state.pose, self.cfg.camera,
                             self.cfg.noise, self.rng)

    # -- skills ----------------------------------------------------------

    def go_to(self, location: str) -> SkillResult:
        """Drive to a named location using the configured navigator."""
        goal = get_position(self.world, location)
        run = self._begin()
        self.navigator.begin(self.world, self.state.pose, goal)
        while True:
            if self.state.pose.distance_to(goal) <= self.cfg.goal_radius:
                return self._finish(run, SkillStatus.SUCCESS)
            if (res := self._guard(run)) is not None:
                return res
            v, omega = self.navigator.act(self.world, self.state.pose, goal)
            if not self._try_move(run, v, omega):
                if getattr(self.navigator, "collision_is_failure", True):
                    return self._finish(run, SkillStatus.FAILURE, "collision")
                self._tick(run)  # hold this period; the controller will re-plan

    def approach(self, marker_id: int, x: float) -> SkillResult:
        """Servo to a stand-off of x meters in front of a fiducial marker."""
        marker_id = int(marker_id)
        if self.world.marker_by_id(marker_id) is None:
            known = ", ".join(str(m.id) for m in self.world.markers) or "(none)"
            raise CatalogError(f"unknown marker id {marker_id}; known ids: {known}")
        if not x > 0:
            raise CatalogError(f"approach distance must be positive, got {x}")
        cfg = self.cfg
        run = self._begin()
        lost = 0.0
        while True:
            marker = self.world.marker_by_id(marker_id)
            true_r = self.state.pose.distance_to(marker.pose.position)
            true_b = wrap_angle(
                math.atan2(marker.pose.y - self.state.pose.y,
                           marker.pose.x - self.state.pose.x) - self.state.pose.theta
            )
            if abs(true_r - x) <= cfg.approach_tol_range and abs(true_b) <= cfg.approach_tol_bearing:
                self.last_approach_heading = wrap_angle(self.state.pose.theta + true_b)
                return self._finish(run, SkillStatus.SUCCESS)
            if (res := self._guard(run)) is not None:
                return res
            seen = {m.marker_id: m for m in self.sense()}
            if marker_id not in seen:
                lost += cfg.control_dt
                if lost > cfg.marker_lost_budget:
                    return self._finish(run, SkillStatus.FAILURE, "marker-lost")
                self._tick(run)  # hold position, wait to re-acquire
                continue
            lost = 0.0
            obs = seen[marker_id]
            omega = max(-cfg.omega_max, min(cfg.omega_max, cfg.k_bearing * obs.bearing))
            v = max(0.0, min(cfg.cruise_v, cfg.k_range * (obs.range - x)))
            if not self._try_move(run, v, omega):
                return self._finish(run, SkillStatus.FAILURE, "collision")

    def leave(self, x: float) -> SkillResult:
        """Move at least x meters away from the current spot.

        After an approach this reverses the approach direction: backward
        motion is excluded (no rear sensing), so the robot rotates half a
        turn first and then drives out.
        """
        if not x > 0:
            raise CatalogError(f"leave distance must be positive, got {x}")
        cfg = self.cfg
        run = self._begin()
        origin = self.state.pose.position
        if self.last_approach_heading is not None:
            heading = wrap_angle(self.last_approach_heading + math.pi)
        else:
            heading = self.state.pose.theta
        while True:
            if self.state.pose.distance_to(origin) >= x:
                self.last_approach_heading = None
                return self._finish(run, SkillStatus.SUCCESS)
            if (res := self._guard(run)) is not None:
                return res
            err = wrap_angle(heading - self.state.pose.theta)
            if abs(err) > cfg.rotate_tol:
                omega = max(-cfg.omega_max, min(cfg.omega_max, cfg.k_heading * err))
                self._tick(run, integrate_unicycle(self.state.pose, 0.0, omega, cfg.control_dt))
                continue
            front = scan(self.world, self.state.pose,
                         self.state.pose.theta + np.linspace(-0.5, 0.5, 5), 0.0, 2.0)
            if float(front.min()) < cfg.robot_radius + 0.1:
                self._tick(run)  # blocked: hold rather than collide
                continue
            omega = max(-cfg.omega_max, min(cfg.omega_max, cfg.k_heading * err))
            if not self._try_move(run, cfg.cruise_v, omega):
                return self._finish(run, SkillStatus.FAILURE, "collision")

    def pick(self, item: str) -> SkillResult:
        """Grasp a nearby item: PrePick -> Pick (close fingers) -> PostPick."""
        if self.state.arm is not ArmState.HOME:
            raise ProtocolError(f"pick requires the arm at home, not {self.state.arm.value}")
        if self.state.held_item is not None:
            raise ProtocolError(f"already holding {self.state.held_item!r}")
        key = resolve_registry(item, self.world.items)
        if key is None:
            known = ", ".join(sorted(self.world.items)) or "(none)"
            raise CatalogError(f"unknown item {item!r}; known items: {known}")
        target = self.world.items[key]
        run = self._begin()
        dist = self.state.pose.distance_to(target.pose.position)
        if dist > self.cfg.reach_radius:
            return self._finish(run, SkillStatus.FAILURE,
                                f"out of reach: {key} is {dist:.2f} m away")
        bearing = wrap_angle(
            math.atan2(target.pose.y - self.state.pose.y, target.pose.x - self.state.pose.x)
            - self.state.pose.theta
        ) if dist > 1e-9 else 0.0
        if abs(bearing) > self.cfg.reach_bearing:
            return self._finish(run, SkillStatus.FAILURE,
                                f"out of reach: {key} is {math.degrees(bearing):.0f} deg off axis")
        opener = gripper_trajectory("open", self.cfg.gripper_travel, self.cfg.gripper_a_peak,
                                    v_max=self.cfg.gripper_v_max)
        closer = gripper_trajectory("close", self.cfg.gripper_travel, self.cfg.gripper_a_peak,
                                    v_max=self.cfg.gripper_v_max)
        self._run_arm_phase(run, ArmState.PRE_PICK, gripper=opener)
        self._run_arm_phase(run, ArmState.PICK, gripper=closer)
        self.state.held_item = key
        target.held = True
        target.pose = self.state.pose
        self._run_arm_phase(run, ArmState.POST_PICK)
        return self._finish(run, SkillStatus.SUCCESS)

    def place(self, item: str) -> SkillResult:
        """Set the held item down ahead: PrePlace -> Place (open) -> PostPlace."""
        key = resolve_registry(item, self.world.items)
        if key is None or self.state.held_item != key:
            raise ProtocolError(
                f"place({item!r}) requires holding it; holding: {self.state.held_item!r}"
            )
        cfg = self.cfg
        run = self._begin()
        pose = self.state.pose
        spot = (pose.x + cfg.place_ahead * math.cos(pose.theta),
                pose.y + cfg.place_ahead * math.sin(pose.theta))
        blocked = (
            not self.world.bounds.contains(spot[0], spot[1])
            or collision_check(self.world, Pose2D(spot[0], spot[1], 0.0), cfg.item_radius)
        )
        if blocked:
            return self._finish(run, SkillStatus.FAILURE, "placement spot blocked")
        opener = gripper_trajectory("open", cfg.gripper_travel, cfg.gripper_a_peak,
                                    v_max=cfg.gripper_v_max)
        closer = gripper_trajectory("close", cfg.gripper_travel, cfg.gripper_a_peak,
                                    v_max=cfg.gripper_v_max)
        self._run_arm_phase(run, ArmState.PRE_PLACE)
        self._run_arm_phase(run, ArmState.PLACE, gripper=opener)
        held = self.world.items[key]
        held.pose = Pose2D(spot[0], spot[1], pose.theta)
        held.held = False
        self.state.held_item = None
        # Fingers close again after the retreat; the arm parks at home.
        self._run_arm_phase(run, ArmState.POST_PLACE, gripper=closer)
        self._run_arm_phase(run, ArmState.HOME)
        return self._finish(run, SkillStatus.SUCCESS)

    def get_position(self, name: str) -> tuple[float, float]:
        return get_position(self.world, name)
