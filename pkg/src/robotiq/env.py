"""Goal-reaching navigation MDP over a `WorldMap`.

State: n forward-arc lidar ranges plus heading error and goal distance,
each boxed by fixed per-dimension bounds. Action: turn rate only (constant
forward speed; the lidar covers no rear arc, so backward motion is out).
Reward: alignment times an exponential progress ratio, with terminal
bonus/penalty of +/- q on goal/collision.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, ProtocolError, SetupError
from .world import Pose2D, WorldMap, collision_check, integrate_unicycle, scan, wrap_angle

_D_CURRENT_FLOOR = 1e-6


# --- action spaces ----------------------------------------------------------

@dataclass(frozen=True)
class DiscreteSpec:
    """N turn rates evenly spread over [-omega_max, +omega_max], N odd."""

    n_actions: int = 5
    omega_max: float = 1.5

    def __post_init__(self):
        if self.n_actions < 3 or self.n_actions % 2 == 0:
            raise InvalidInputError(f"discrete action count must be odd and >= 3, got {self.n_actions}")
        if not self.omega_max > 0:
            raise InvalidInputError("omega_max must be positive")

    def to_dict(self) -> dict:
        return {"type": "discrete", "n": self.n_actions, "omega_max": self.omega_max}


@dataclass(frozen=True)
class ContinuousSpec:
    omega_min: float = -1.5
    omega_max: float = 1.5

    def __post_init__(self):
        if not self.omega_min < self.omega_max:
            raise InvalidInputError("need omega_min < omega_max")

    def to_dict(self) -> dict:
        return {"type": "continuous", "omega_min": self.omega_min, "omega_max": self.omega_max}


ActionSpec = DiscreteSpec | ContinuousSpec


def action_spec_from_dict(d: dict) -> ActionSpec:
    kind = d.get("type", "discrete")
    if kind == "discrete":
        return DiscreteSpec(n_actions=int(d.get("n", 5)), omega_max=float(d.get("omega_max", 1.5)))
    if kind == "continuous":
        return ContinuousSpec(
            omega_min=float(d.get("omega_min", -1.5)), omega_max=float(d.get("omega_max", 1.5))
        )
    raise InvalidInputError(f"unknown action spec type {kind!r}")


def discrete_actions(n_actions: int, omega_max: float) -> list[float]:
    """Turn-rate table: ((N-1)/2 - a) * dw for a = 0..N-1, dw = omega_max / ((N-1)/2).

    First entry +omega_max, middle 0, last -omega_max.
    """
    if n_actions < 3 or n_actions % 2 == 0:
        raise InvalidInputError(f"action count must be odd and >= 3, got {n_actions}")
    if not omega_max > 0:
        raise InvalidInputError("omega_max must be positive")
    half = (n_actions - 1) // 2
    dw = omega_max / half
    return [(half - a) * dw for a in range(n_actions)]


# --- configuration ----------------------------------------------------------

@dataclass(frozen=True)
class EnvConfig:
    """Navigation MDP parameters. Distances in meters, angles in radians.

    delta is the lidar angular resolution in degrees over a 180-degree
    forward arc, so n = 180/delta + 1.
    """

    n: int = 25
    delta: float = 7.5
    r_min: float = 0.120
    r_max: float = 3.5
    d_max: float | None = None  # None -> map diagonal
    v: float = 0.2
    dt: float = 0.1
    q_bonus: float = 200.0
    goal_radius: float = 0.2
    max_steps: int = 300
    yaw_scale: float = 5.0
    robot_radius: float = 0.22
    action: ActionSpec = field(default_factory=DiscreteSpec)
    start_pose: tuple[float, float, float] | None = None
    goal: tuple[float, float] | None = None
    min_goal_separation: float = 0.6
    max_goal_separation: float | None = None  # sampling cap; None -> d_max
    score_max_return: float | None = None  # None -> +q_bonus
    d_goal_mode: str = "episode_start"  # or "d_max"

    def __post_init__(self):
        if not self.r_min < self.r_max:
            raise InvalidInputError("need r_min < r_max")
        if not self.q_bonus > 0:
            raise InvalidInputError("q_bonus must be positive")
        if not self.v > 0:
            raise InvalidInputError("v must be positive")
        if self.n != round(180.0 / self.delta) + 1:
            raise InvalidInputError(
                f"n={self.n} inconsistent with delta={self.delta} over a 180-degree arc"
            )
        if self.d_goal_mode not in ("episode_start", "d_max"):
            raise InvalidInputError(f"unknown d_goal_mode {self.d_goal_mode!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "EnvConfig":
        d = dict(d)
        if "action" in d and isinstance(d["action"], dict):
            d["action"] = action_spec_from_dict(d["action"])
        if "start_pose" in d and d["start_pose"] is not None:
            d["start_pose"] = tuple(d["start_pose"])
        if "goal" in d and d["goal"] is not None:
            d["goal"] = tuple(d["goal"])
        return cls(**d)

    def resolve_d_max(self, world: WorldMap) -> float:
        return self.d_max if self.d_max is not None else world.bounds.diagonal

    def fingerprint(self) -> dict:
        """Sensor/action compatibility signature embedded in checkpoints."""
        return {
            "n": self.n,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "v": self.v,
            "dt": self.dt,
            "action": self.action.to_dict(),
        }


# --- observations and episode bookkeeping -----------------------------------

@dataclass(frozen=True)
class Observation:
    """MDP state vector: lidar ranges + heading error + goal distance."""

    ranges: np.ndarray
    heading_error: float
    goal_distance: float

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.ranges, [self.heading_error, self.goal_distance]])

    def __eq__(self, other):
        return (
            isinstance(other, Observation)
            and np.array_equal(self.ranges, other.ranges)
            and self.heading_error == other.heading_error
            and self.goal_distance == other.goal_distance
        )


def observation_bounds(cfg: EnvConfig, d_max: float) -> tuple[np.ndarray, np.ndarray]:
    """(lower, upper) box bounds of the observation vector."""
    lo = np.concatenate([np.full(cfg.n, cfg.r_min), [-math.pi, 0.0]])
    hi = np.concatenate([np.full(cfg.n, cfg.r_max), [math.pi, d_max]])
    return lo, hi


class Event(enum.Enum):
    NONE = "none"
    GOAL = "goal"
    COLLISION = "collision"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class StepResult:
    observation: Observation
    reward: float
    done: bool
    event: Event


@dataclass
class EpisodeContext:
    goal: tuple[float, float]
    start_pose: Pose2D
    d_goal: float  # start-to-goal distance, fixed at reset
    step_count: int = 0


# --- pure state/reward operations -------------------------------------------

def goal_bearing(robot: Pose2D, goal: tuple[float, float]) -> float:
    """World-frame angle from the robot's position to the goal point."""
    dx = goal[0] - robot.x
    dy = goal[1] - robot.y
    if dx == 0.0 and dy == 0.0:
        raise InvalidInputError("goal coincides with the robot position")
    return math.atan2(dy, dx)


def heading_error(theta_goal: float, r_h: float) -> float:
    """Wrapped angular difference; positive means a counterclockwise correction."""
    if not (math.isfinite(theta_goal) and math.isfinite(r_h)):
        raise InvalidInputError("heading_error needs finite angles")
    return wrap_angle(theta_goal - r_h)


def shaped_reward(phi: float, d_goal: float, d_current: float, cfg: EnvConfig) -> float:
    """Alignment reward scaled by exponential progress: (s * r_yaw) * 2^(Dg/Dc).

    r_yaw = 1 - |phi|/pi lies in [0, 1] (0 facing away, 1 dead-on).
    d_current is floored at 1e-6 so the exponent stays finite.
    """
    r_yaw = 1.0 - abs(wrap_angle(phi)) / math.pi
    if r_yaw == 0.0:
        return 0.0
    ratio = d_goal / max(d_current, _D_CURRENT_FLOOR)
    try:
        factor = 2.0**ratio
    except OverflowError:
        factor = math.inf
    return cfg.yaw_scale * r_yaw * factor


def step_reward(event: Event, shaped: float, cfg: EnvConfig) -> float:
    """Terminal table: -q on collision, +q on goal, shaped value otherwise."""
    if event is Event.COLLISION:
        return -cfg.q_bonus
    if event is Event.GOAL:
        return cfg.q_bonus
    return shaped


def observe(world: WorldMap, pose: Pose2D, ctx: EpisodeContext, cfg: EnvConfig) -> Observation:
    """Build the state vector: n rays over [theta - pi/2, theta + pi/2], plus
    wrapped heading error and goal distance clamped to d_max."""
    angles = pose.theta + np.linspace(-math.pi / 2.0, math.pi / 2.0, cfg.n)
    ranges = scan(world, pose, angles, cfg.r_min, cfg.r_max)
    d_current = pose.distance_to(ctx.goal)
    if d_current < 1e-12:
        phi = 0.0
    else:
        phi = heading_error(goal_bearing(pose, ctx.goal), pose.theta)
    d_max = cfg.resolve_d_max(world)
    return Observation(ranges=ranges, heading_error=phi, goal_distance=min(d_current, d_max))


def normalize_score(episode_return: float, cfg: EnvConfig) -> float:
    """Affine map of episodic return: -q -> 0, configured max return -> 1."""
    lo = -cfg.q_bonus
    hi = cfg.score_max_return if cfg.score_max_return is not None else cfg.q_bonus
    score = (episode_return - lo) / (hi - lo)
    return float(min(max(score, 0.0), 1.0))


# --- the environment ---------------------------------------------------------

class NavEnv:
    """Single-owner mutable episode state over an immutable world."""

    def __init__(self, world: WorldMap, cfg: EnvConfig | None = None, seed: int | None = None):
        self.world = world
        self.cfg = cfg or EnvConfig()
        self.d_max = self.cfg.resolve_d_max(world)
        self._rng = np.random.default_rng(seed)
        if isinstance(self.cfg.action, DiscreteSpec):
            self._omegas = discrete_actions(self.cfg.action.n_actions, self.cfg.action.omega_max)
        else:
            self._omegas = None
        self.pose: Pose2D | None = None
        self.ctx: EpisodeContext | None = None
        self._done = True
        self.record_transcript = False
        self.transcript: list[dict] = []

    @property
    def obs_dim(self) -> int:
        return self.cfg.n + 2

    def _sample_free_pose(self, rng, margin: float) -> Pose2D:
        bmin, bmax = self.world.bounds.min_corner, self.world.bounds.max_corner
        for _ in range(10_000):
            x = rng.uniform(bmin[0] + margin, bmax[0] - margin)
            y = rng.uniform(bmin[1] + margin, bmax[1] - margin)
            theta = rng.uniform(-math.pi, math.pi)
            pose = Pose2D(x, y, theta)
            if not collision_check(self.world, pose, self.cfg.robot_radius):
                return pose
        raise SetupError("could not sample a collision-free pose in 10^4 attempts")

    def _separation_window(self) -> tuple[float, float]:
        cap = self.d_max
        if self.cfg.max_goal_separation is not None:
            cap = min(cap, self.cfg.max_goal_separation)
        return self.cfg.min_goal_separation, cap

    def _fixed_start(self) -> Pose2D:
        start = Pose2D(*self.cfg.start_pose)
        if collision_check(self.world, start, self.cfg.robot_radius):
            raise SetupError(f"configured start pose {start} is in collision")
        return start

    def _sample_episode(self, rng) -> tuple[Pose2D, tuple[float, float]]:
        """Start pose and goal honoring the configured separation window."""
        cfg = self.cfg
        lo, hi = self._separation_window()
        margin = cfg.robot_radius + 1e-3
        if cfg.start_pose is not None and cfg.goal is not None:
            start = self._fixed_start()
            goal = (float(cfg.goal[0]), float(cfg.goal[1]))
            d = start.distance_to(goal)
            if not 0.0 < d <= self.d_max:
                raise SetupError(f"start-to-goal distance {d:.3f} outside (0, d_max]")
            return start, goal
        for _ in range(10_000):
            start = self._fixed_start() if cfg.start_pose is not None else \
                self._sample_free_pose(rng, margin)
            if cfg.goal is not None:
                goal = (float(cfg.goal[0]), float(cfg.goal[1]))
            else:
                goal = self._sample_free_pose(rng, margin).position
            if lo <= start.distance_to(goal) <= hi:
                return start, goal
        raise SetupError("could not sample a start/goal pair in 10^4 attempts")

    def reset(self, seed: int | None = None) -> Observation:
        """Start a new episode; deterministic for a given seed."""
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        rng = self._rng
        start, goal = self._sample_episode(rng)
        d_goal = start.distance_to(goal)
        self.pose = start
        self.ctx = EpisodeContext(goal=goal, start_pose=start, d_goal=d_goal)
        self._done = False
        self.transcript = []
        return observe(self.world, self.pose, self.ctx, self.cfg)

    def _resolve_omega(self, action) -> float:
        if self._omegas is not None:
            idx = int(action)
            if idx != action or not 0 <= idx < len(self._omegas):
                raise InvalidInputError(f"discrete action index out of range: {action!r}")
            return self._omegas[idx]
        spec = self.cfg.action
        return float(min(max(float(action), spec.omega_min), spec.omega_max))

    def step(self, action) -> StepResult:
        """Apply one control period of (v, omega); see Event for terminals."""
        if self._done or self.ctx is None:
            raise ProtocolError("step() called on a finished episode; call reset()")
        omega = self._resolve_omega(action)
        cfg = self.cfg
        self.pose = integrate_unicycle(self.pose, cfg.v, omega, cfg.dt)
        self.ctx.step_count += 1

        d_current = self.pose.distance_to(self.ctx.goal)
        if collision_check(self.world, self.pose, cfg.robot_radius):
            event = Event.COLLISION
        elif d_current <= cfg.goal_radius:
            event = Event.GOAL
        elif self.ctx.step_count >= cfg.max_steps:
            event = Event.TIMEOUT
        else:
            event = Event.NONE

        obs = observe(self.world, self.pose, self.ctx, cfg)
        d_goal = self.ctx.d_goal if cfg.d_goal_mode == "episode_start" else self.d_max
        shaped = shaped_reward(obs.heading_error, d_goal, d_current, cfg)
        reward = step_reward(event, shaped, cfg)
        self._done = event is not Event.NONE

        if self.record_transcript:
            self.transcript.append(
                {
                    "obs": obs.as_vector().tolist(),
                    "action": float(omega) if self._omegas is None else int(action),
                    "reward": reward,
                    "event": event.value,
                }
            )
        return StepResult(observation=obs, reward=reward, done=self._done, event=event)

    def current_observation(self) -> Observation:
        """Observation of the live episode state (for resumed rollouts)."""
        if self._done or self.ctx is None:
            raise ProtocolError("no live episode; call reset()")
        return observe(self.world, self.pose, self.ctx, self.cfg)

    @property
    def done(self) -> bool:
        return self._done


def dump_transcript(records: list[dict], fh) -> None:
    """Write one JSON object per step, one per line."""
    for rec in records:
        fh.write(json.dumps(rec) + "\n")
