"""Scripted benchmark: repeated seeded trials of a command sequence."""

from __future__ import annotations

import numpy as np

from ..errors import CompileError
from ..skills import FallbackNavigator, PolicyNavigator, SkillConfig
from ..world import Pose2D, WorldMap, collision_check
from .metrics import MetricsReport, metrics_report
from .session import Session, TaskRecord

JITTER_XY = 0.15
JITTER_THETA = 0.3


def jitter_start(world: WorldMap, rng: np.random.Generator, robot_radius: float) -> Pose2D:
    """Perturbed copy of the map start pose, kept collision-free."""
    base = world.start_pose
    for _ in range(100):
        pose = Pose2D(
            base.x + rng.uniform(-JITTER_XY, JITTER_XY),
            base.y + rng.uniform(-JITTER_XY, JITTER_XY),
            base.theta + rng.uniform(-JITTER_THETA, JITTER_THETA),
        )
        if not collision_check(world, pose, robot_radius):
            return pose
    return base


def make_navigator(kind: str, skill_cfg: SkillConfig, checkpoint=None):
    if kind == "fallback":
        return FallbackNavigator(skill_cfg)
    if kind == "policy":
        if checkpoint is None:
            raise ValueError("policy navigator needs a checkpoint")
        from ..env import EnvConfig, action_spec_from_dict

        fp = checkpoint.fingerprint
        env_cfg = EnvConfig(
            n=fp["n"], delta=180.0 / (fp["n"] - 1), r_min=fp["r_min"], r_max=fp["r_max"],
            v=fp["v"], dt=fp["dt"], action=action_spec_from_dict(fp["action"]),
        )
        return PolicyNavigator(checkpoint.params, env_cfg)
    raise ValueError(f"unknown navigator kind {kind!r}")


def run_bench(
    world: WorldMap,
    commands: list[str],
    trials: int,
    seed: int,
    *,
    backend_factory=None,
    navigator: str = "fallback",
    checkpoint=None,
    skill_cfg: SkillConfig | None = None,
    voice_latency: float = 0.0,
    progress=None,
) -> tuple[MetricsReport, list[dict]]:
    """Run the command script `trials` times with seeded start-pose jitter.

    Per-trial failures (compile or execution) are recorded as failed rows,
    never raised. Returns the aggregate report plus the raw per-record rows.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cfg = skill_cfg or SkillConfig()
    rows: list[dict] = []
    children = np.random.SeedSequence(seed).spawn(trials)
    for trial in range(trials):
        jitter_seed, runtime_seed = children[trial].spawn(2)
        rng = np.random.default_rng(jitter_seed)
        start = jitter_start(world, rng, cfg.robot_radius)
        session = Session(
            world,
            backend=None if backend_factory is None else backend_factory(),
            navigator=make_navigator(navigator, cfg, checkpoint),
            skill_cfg=cfg,
            voice_latency=voice_latency,
            start_pose=start,
            seed=int(runtime_seed.generate_state(1)[0]) % (2**31),
        )
        for command in commands:
            try:
                records = session.submit_command(command)
            except CompileError as exc:
                records = [TaskRecord(task=f"compile:{exc.stage}", t_llm=voice_latency,
                                      t_robot=0.0, success=False)]
            rows.extend({"trial": trial, **r.to_dict()} for r in records)
        if progress is not None:
            progress(trial, rows)
    return metrics_report(rows), rows
