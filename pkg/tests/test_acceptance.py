"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion lines.
The learning/transfer criteria (5, 6) train real policies from the shipped
run configs and dominate the runtime (several minutes on a laptop CPU).
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

import test_rl
from oracles import free_origin, marching_ray_oracle, random_world
from robotiq.env import (
    EnvConfig,
    Event,
    NavEnv,
    discrete_actions,
    shaped_reward,
    step_reward,
)
from robotiq.planner import Plan, SkillCall, build_catalog, validate_plan
from robotiq.rl import TrainConfig, train, transfer_eval
from robotiq.rl.policy import action_logp
from robotiq.skills import gripper_trajectory
from robotiq.world import (
    Pose2D,
    load_world_file,
    quaternion_from_heading,
    heading_from_quaternion,
    integrate_unicycle,
    ray_cast,
    wrap_angle,
)

ROOT = Path(__file__).resolve().parents[1]
MAPS = ROOT / "src" / "robotiq" / "maps"
CONFIGS = ROOT / "configs"
FIXTURES = Path(__file__).parent / "fixtures"


class Budget:
    def __init__(self, name: str, seconds: float):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        status = "PASS" if exc_type is None else "FAIL"
        print(f"[{status}] {self.name} in {elapsed:.1f} s (budget {self.seconds:.0f} s)")
        if exc_type is None:
            assert elapsed < self.seconds, f"{self.name} exceeded its runtime budget"


def load_run_config(name: str) -> dict:
    with open(CONFIGS / name, "r", encoding="utf-8") as fh:
        return json.load(fh)


def test_criterion_1_reward_table():
    with Budget("criterion 1: reward table", 1.0):
        cfg = EnvConfig()
        assert step_reward(Event.COLLISION, 123.0, cfg) == -cfg.q_bonus
        assert step_reward(Event.GOAL, -5.0, cfg) == cfg.q_bonus
        assert step_reward(Event.NONE, 7.25, cfg) == 7.25
        assert step_reward(Event.TIMEOUT, 7.25, cfg) == 7.25
        assert abs(shaped_reward(0.0, 2.0, 2.0, cfg) - 10.0) < 1e-12
        assert abs(shaped_reward(math.pi, 2.0, 2.0, cfg) - 0.0) < 1e-12
        assert abs(shaped_reward(-math.pi, 2.0, 2.0, cfg) - 0.0) < 1e-12
        assert abs(shaped_reward(0.0, 2.0, 1.0, cfg) - 20.0) < 1e-12


def test_criterion_2_action_space_table():
    with Budget("criterion 2: action-space table", 1.0):
        assert discrete_actions(5, 1.5) == [1.5, 0.75, 0.0, -0.75, -1.5]
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = 2 * int(rng.integers(1, 16)) + 1
            omega_max = float(rng.uniform(0.05, 5.0))
            acts = discrete_actions(n, omega_max)
            assert len(acts) == n
            assert acts[(n - 1) // 2] == 0.0
            for a in range(n):
                assert abs(acts[a] + acts[n - 1 - a]) < 1e-12


def test_criterion_3_geometry_oracles():
    with Budget("criterion 3: geometry oracles", 30.0):
        rng = np.random.default_rng(2024)
        checked = 0
        while checked < 1000:
            world = random_world(rng)
            origin = free_origin(rng, world)
            for _ in range(10):
                angle = float(rng.uniform(-math.pi, math.pi))
                got = ray_cast(world, origin, angle, 0.0, 3.5)
                want = marching_ray_oracle(world, origin, angle, 3.5)
                assert abs(got - want) < 5e-4
                checked += 1

        for h in np.linspace(-math.pi + 1e-12, math.pi, 10_000):
            back = heading_from_quaternion(quaternion_from_heading(float(h)))
            assert abs(wrap_angle(back - h)) < 1e-9

        for v, omega, dt in [(1.0, 1.0, math.pi), (0.2, 1.5, 0.5), (0.3, -2.0, 1.0)]:
            p = integrate_unicycle(Pose2D(0, 0, 0), v, omega, dt)
            ex = (v / omega) * math.sin(omega * dt)
            ey = (v / omega) * (1.0 - math.cos(omega * dt))
            assert math.hypot(p.x - ex, p.y - ey) < 1e-6


def test_criterion_4_gradient_checks():
    with Budget("criterion 4: policy-gradient finite differences", 60.0):
        from robotiq.env import ContinuousSpec, DiscreteSpec

        rng = np.random.default_rng(11)
        for spec in (DiscreteSpec(3, 1.0), ContinuousSpec(-1.5, 1.5)):
            params = test_rl.tiny_policy(spec)
            arrays = params.pi_param_arrays()
            n_params = sum(a.size for a in arrays)
            assert n_params <= 200
            obs = rng.uniform(-1, 1, size=(8, 3))
            if isinstance(spec, DiscreteSpec):
                act = rng.integers(0, 3, size=8)
            else:
                act = rng.uniform(-1.0, 1.0, size=8)
            adv = rng.normal(size=8)

            from robotiq.rl import pi_loss_and_grad

            _, grads, _ = pi_loss_and_grad(params, obs, act, adv, algo="vpg")
            fd = test_rl.fd_gradient(
                lambda: pi_loss_and_grad(params, obs, act, adv, algo="vpg")[0], arrays
            )
            assert test_rl.rel_err(test_rl.flatten_arrays(grads), fd) < 1e-4

            old = action_logp(params, obs, act) - np.log(
                np.array([1.0, 1.3, 0.7, 1.05, 0.95, 1.5, 0.5, 1.1])
            )
            _, grads, _ = pi_loss_and_grad(
                params, obs, act, adv, algo="ppo", old_logp=old, clip_ratio=0.2
            )
            fd = test_rl.fd_gradient(
                lambda: pi_loss_and_grad(
                    params, obs, act, adv, algo="ppo", old_logp=old, clip_ratio=0.2
                )[0],
                arrays,
            )
            assert test_rl.rel_err(test_rl.flatten_arrays(grads), fd) < 1e-4


@pytest.fixture(scope="module")
def corridor_training():
    cfg = load_run_config("train_corridor.json")
    world = load_world_file(MAPS / f"{cfg['map']}.json")
    env_cfg = EnvConfig.from_dict(cfg["env"])

    def factory(seed):
        return NavEnv(world, env_cfg, seed=seed)

    t0 = time.perf_counter()
    result = train(factory, TrainConfig.from_dict(cfg["train"]))
    return result, time.perf_counter() - t0


@pytest.fixture(scope="module")
def obstacle_training():
    cfg = load_run_config("train_obstacle.json")
    world = load_world_file(MAPS / f"{cfg['map']}.json")
    env_cfg = EnvConfig.from_dict(cfg["env"])

    def factory(seed):
        return NavEnv(world, env_cfg, seed=seed)

    t0 = time.perf_counter()
    results = {}
    for algo in ("ppo", "vpg"):
        tcfg = TrainConfig.from_dict({**cfg["train"], "algorithm": algo})
        results[algo] = train(factory, tcfg)
    return results, time.perf_counter() - t0


def test_criterion_5_learning(corridor_training, obstacle_training):
    corridor_result, corridor_elapsed = corridor_training
    obstacle_results, obstacle_elapsed = obstacle_training
    train_elapsed = corridor_elapsed + obstacle_elapsed
    with Budget("criterion 5: learning (corridor + PPO-vs-VPG ordering)", 1800.0) as b:
        b.t0 -= train_elapsed  # count the fixture's training time against the budget
        seeds = (0, 1, 2)
        corridor_hits = 0
        for seed in seeds:
            rows = corridor_result.curve.seed_rows(seed)
            if any(r["mean_score"] >= 0.9 for r in rows if r["epoch"] <= 20):
                corridor_hits += 1
        print(f"    corridor seeds reaching 0.9: {corridor_hits}/3")
        assert corridor_hits >= 2

        ordering_hits = 0
        for seed in seeds:
            finals = {}
            for algo in ("ppo", "vpg"):
                rows = [r for r in obstacle_results[algo].curve.seed_rows(seed) if r["epoch"] > 0]
                k = max(1, len(rows) // 10)
                finals[algo] = float(np.mean([r["mean_score"] for r in rows[-k:]]))
            print(f"    seed {seed}: PPO final-10% {finals['ppo']:.3f} vs VPG {finals['vpg']:.3f}")
            if finals["ppo"] >= finals["vpg"]:
                ordering_hits += 1
        assert ordering_hits >= 2


def test_criterion_6_transfer(obstacle_training):
    with Budget("criterion 6: zero-shot transfer with relocated goal", 120.0):
        results, _ = obstacle_training
        best = results["ppo"].best
        tcfg = load_run_config("transfer_obstacle.json")
        world = load_world_file(MAPS / f"{tcfg['map']}.json")
        env = NavEnv(world, EnvConfig.from_dict(tcfg["env"]), seed=0)
        out = transfer_eval(best, env, episodes=50)
        print(f"    best checkpoint: seed {best.seed} epoch {best.epoch}; "
              f"transfer success {out['success_rate']:.2f}")
        assert len(out["score_series"]) == 50
        assert out["success_rate"] >= 0.6


def test_criterion_7_gripper_profile():
    with Budget("criterion 7: gripper trajectory profile", 1.0):
        for direction, sign in (("open", 1.0), ("close", -1.0)):
            prof = gripper_trajectory(direction, 0.02, 1.0)
            assert all(s.effort == 0.0 for s in prof.samples)
            assert prof.samples[0].velocity == 0.0
            assert prof.samples[-1].velocity == 0.0
            peak = max(abs(s.acceleration) for s in prof.samples)
            assert 0.9 <= peak <= 1.1
            t = np.array([s.t for s in prof.samples])
            v = np.array([s.velocity for s in prof.samples])
            assert abs(np.trapezoid(v, t) - sign * 0.02) < 1e-6


def test_criterion_8_safety_gate():
    with Budget("criterion 8: plan-validation safety gate", 1.0):
        world = load_world_file(MAPS / "demo_home.json")
        catalog = build_catalog(world)
        with open(FIXTURES / "adversarial_plans.json", "r", encoding="utf-8") as fh:
            fx = json.load(fh)
        assert len(fx["reject"]) == 25
        for case in fx["reject"]:
            plan = Plan(steps=[SkillCall(s["fn"], s["args"]) for s in case["steps"]])
            report = validate_plan(plan, catalog, world)
            assert not report.accepted, f"{case['name']} was not rejected"
        good = Plan(steps=[SkillCall(s["fn"], s["args"]) for s in fx["accept"]["steps"]])
        assert validate_plan(good, catalog, world).accepted


@pytest.fixture(scope="module")
def bench_csvs(tmp_path_factory):
    from robotiq.cli import main

    out_dir = tmp_path_factory.mktemp("bench")
    paths = []
    t0 = time.perf_counter()
    for run in ("a", "b"):
        out = out_dir / f"metrics_{run}.csv"
        cdf = out_dir / f"cdf_{run}.csv"
        rc = main([
            "bench", "--map", "demo_home",
            "--script", str(CONFIGS / "bench_home_service.txt"),
            "--trials", "50", "--seed", "0",
            "--out", str(out), "--cdf-out", str(cdf),
        ])
        assert rc == 0
        paths.append((out, cdf))
    return paths, time.perf_counter() - t0


def test_criterion_9_end_to_end_bench(bench_csvs, capsys):
    paths, bench_elapsed = bench_csvs
    with Budget("criterion 9: end-to-end home-service bench", 300.0) as b:
        b.t0 -= bench_elapsed / 2  # one of the two identical seeded runs
        metrics_path, cdf_path = paths[0]
        rows = []
        with open(metrics_path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            for line in fh:
                parts = line.strip().split(",")
                rows.append(dict(zip(header, parts)))
        assert {r["task"].split(":")[1] for r in rows} == {
            "go_to", "pick", "leave", "place",
        }
        per_task: dict[str, list[bool]] = {}
        for r in rows:
            per_task.setdefault(r["task"], []).append(r["success"] == "true")
            t_llm, t_robot, t_total = (float(r["t_llm"]), float(r["t_robot"]),
                                       float(r["t_total"]))
            assert t_total == t_llm + t_robot  # bitwise identity
            if r["success"] != "true":
                assert t_robot == 0.0
        for task, flags in per_task.items():
            rate = sum(flags) / len(flags)
            print(f"    {task}: success rate {rate:.2f} over {len(flags)} trials")
            assert rate >= 0.7, task
        with open(cdf_path, "r", encoding="utf-8") as fh:
            fh.readline()
            fracs = [float(line.strip().split(",")[1]) for line in fh if line.strip()]
        assert fracs == sorted(fracs)
        assert fracs[-1] == 1.0


def test_criterion_10_bench_determinism(bench_csvs):
    paths, bench_elapsed = bench_csvs
    with Budget("criterion 10: bench byte-determinism", 300.0) as b:
        b.t0 -= bench_elapsed / 2  # the repeated run
        (m_a, c_a), (m_b, c_b) = paths
        assert m_a.read_bytes() == m_b.read_bytes()
        assert c_a.read_bytes() == c_b.read_bytes()
