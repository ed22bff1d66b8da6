"""Training loop, deterministic evaluation, checkpoints, learning curves."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..env import Event, NavEnv, normalize_score
from ..errors import TrainingFailure
from .algos import Updater, collect_rollouts
from .policy import (
    PolicyParams,
    check_fingerprint,
    init_policy,
    load_checkpoint_dict,
    mean_action,
    save_checkpoint_dict,
)

EVAL_SEED_BASE = 10_000_000


@dataclass(frozen=True)
class TrainConfig:
    algorithm: str = "ppo"  # "ppo" | "vpg"
    epochs: int = 60
    steps_per_epoch: int = 1000
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip_ratio: float = 0.2
    pi_lr: float = 3e-4
    v_lr: float = 1e-3
    train_iters: int = 10
    minibatch_size: int = 256
    value_iters: int = 20
    target_kl: float | None = 0.015
    ent_coef: float = 0.0
    reward_scale: float | None = None  # None -> 1/q_bonus (critic conditioning)
    hidden: tuple[int, ...] = (64, 64)
    eval_episodes: int = 10
    seeds: tuple[int, ...] = (0, 1, 2)

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.algorithm not in ("ppo", "vpg"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        d = dict(d)
        if "hidden" in d:
            d["hidden"] = tuple(d["hidden"])
        if "seeds" in d:
            d["seeds"] = tuple(d["seeds"])
        return cls(**d)


@dataclass
class LearningCurve:
    """Per-epoch evaluation rows; epoch 0 is the untrained policy."""

    rows: list[dict] = field(default_factory=list)

    def add(self, epoch: int, seed: int, scores: np.ndarray) -> None:
        self.rows.append(
            {
                "epoch": epoch,
                "seed": seed,
                "mean_score": float(np.mean(scores)),
                "std_score": float(np.std(scores)),
                "episodes": len(scores),
            }
        )

    def seed_rows(self, seed: int) -> list[dict]:
        return [r for r in self.rows if r["seed"] == seed]

    def aggregate(self) -> list[dict]:
        """Mean of mean_score across seeds per epoch."""
        epochs = sorted({r["epoch"] for r in self.rows})
        out = []
        for e in epochs:
            vals = [r["mean_score"] for r in self.rows if r["epoch"] == e]
            out.append({"epoch": e, "mean_score": float(np.mean(vals)), "seeds": len(vals)})
        return out

    def to_csv(self, fh) -> None:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "seed", "mean_score", "std_score", "episodes"])
        for r in self.rows:
            writer.writerow([r["epoch"], r["seed"], repr(r["mean_score"]),
                             repr(r["std_score"]), r["episodes"]])


@dataclass
class Checkpoint:
    params: PolicyParams
    epoch: int
    mean_score: float
    fingerprint: dict
    algorithm: str = "ppo"
    seed: int = 0

    def save(self, path) -> None:
        save_checkpoint_dict(
            {
                "version": 1,
                "algorithm": self.algorithm,
                "epoch": self.epoch,
                "mean_score": self.mean_score,
                "seed": self.seed,
                "fingerprint": self.fingerprint,
                "fingerprint_hash": fingerprint_hash(self.fingerprint),
                "params": self.params.to_dict(),
            },
            path,
        )

    @classmethod
    def load(cls, path) -> "Checkpoint":
        d = load_checkpoint_dict(path)
        return cls(
            params=PolicyParams.from_dict(d["params"]),
            epoch=d["epoch"],
            mean_score=d["mean_score"],
            fingerprint=d["fingerprint"],
            algorithm=d.get("algorithm", "ppo"),
            seed=d.get("seed", 0),
        )


def fingerprint_hash(fp: dict) -> str:
    return hashlib.sha256(json.dumps(fp, sort_keys=True).encode()).hexdigest()[:16]


def evaluate_params(params: PolicyParams, env: NavEnv, episodes: int,
                    seed_base: int = EVAL_SEED_BASE) -> dict:
    """Deterministic mean-action evaluation over seeded episodes."""
    scores = []
    successes = 0
    steps_to_goal = []
    for i in range(episodes):
        obs = env.reset(seed=seed_base + i)
        ep_return = 0.0
        while True:
            a = mean_action(params, obs.as_vector())
            res = env.step(a)
            ep_return += res.reward
            obs = res.observation
            if res.done:
                break
        scores.append(normalize_score(ep_return, env.cfg))
        if res.event is Event.GOAL:
            successes += 1
            steps_to_goal.append(env.ctx.step_count)
    return {
        "scores": np.asarray(scores),
        "mean_score": float(np.mean(scores)),
        "success_rate": successes / episodes,
        "mean_steps_to_goal": float(np.mean(steps_to_goal)) if steps_to_goal else math.nan,
    }


def evaluate(checkpoint: Checkpoint, env: NavEnv, episodes: int,
             seed_base: int = EVAL_SEED_BASE) -> dict:
    """Fingerprint-checked evaluation of a stored policy."""
    check_fingerprint(checkpoint.fingerprint, env.cfg.fingerprint())
    out = evaluate_params(checkpoint.params, env, episodes, seed_base)
    return {
        "success_rate": out["success_rate"],
        "mean_score": out["mean_score"],
        "mean_steps_to_goal": out["mean_steps_to_goal"],
        "scores": out["scores"],
    }


def transfer_eval(checkpoint: Checkpoint, env: NavEnv, episodes: int,
                  seed_base: int = EVAL_SEED_BASE) -> dict:
    """Zero-shot evaluation of a frozen policy on a (possibly shifted) map.

    No gradient updates happen here; the per-episode normalized score series
    is returned for curve comparison.
    """
    out = evaluate(checkpoint, env, episodes, seed_base)
    out["score_series"] = list(map(float, out.pop("scores")))
    return out


@dataclass
class TrainResult:
    curve: LearningCurve
    best: Checkpoint
    per_seed_best: dict


def train(env_factory, cfg: TrainConfig, progress=None) -> TrainResult:
    """Run `cfg.epochs` x `cfg.steps_per_epoch` interactions per seed.

    After every epoch the policy is evaluated deterministically (mean action)
    on a separate env instance; the best checkpoint by mean normalized score
    is retained. Three consecutive NaN-guarded updates abort training.
    """
    curve = LearningCurve()
    best_overall: Checkpoint | None = None
    per_seed_best: dict[int, Checkpoint] = {}

    for seed in cfg.seeds:
        ss = np.random.SeedSequence(seed)
        init_seed, sample_seed, shuffle_seed, env_seed, eval_env_seed = ss.spawn(5)
        env = env_factory(int(env_seed.generate_state(1)[0]) % (2**31))
        eval_env = env_factory(int(eval_env_seed.generate_state(1)[0]) % (2**31))
        from ..env import observation_bounds

        lo, hi = observation_bounds(env.cfg, env.d_max)
        params = init_policy(
            lo, hi, env.cfg.action, np.random.default_rng(init_seed), hidden=cfg.hidden,
            angle_dims=(env.cfg.n,),  # heading error enters the net as (sin, cos)
        )
        sample_rng = np.random.default_rng(sample_seed)
        updater = Updater(params, cfg, np.random.default_rng(shuffle_seed))
        fingerprint = env.cfg.fingerprint()
        reward_scale = cfg.reward_scale if cfg.reward_scale is not None else 1.0 / env.cfg.q_bonus

        def snapshot(epoch: int, score: float) -> Checkpoint:
            return Checkpoint(
                params=params.copy(), epoch=epoch, mean_score=score,
                fingerprint=fingerprint, algorithm=cfg.algorithm, seed=seed,
            )

        ev = evaluate_params(params, eval_env, cfg.eval_episodes)
        curve.add(0, seed, ev["scores"])
        best_seed = snapshot(0, ev["mean_score"])

        nan_streak = 0
        for epoch in range(1, cfg.epochs + 1):
            batch = collect_rollouts(
                env, params, cfg.steps_per_epoch, sample_rng, cfg.gamma, cfg.gae_lambda,
                reward_scale=reward_scale,
            )
            diag = updater.update(batch)
            if diag.get("nan_guard"):
                nan_streak += 1
                if nan_streak >= 3:
                    raise TrainingFailure(
                        f"seed {seed}: non-finite losses for 3 consecutive updates "
                        f"(epoch {epoch}); last diagnostics: {diag}"
                    )
            else:
                nan_streak = 0
            ev = evaluate_params(params, eval_env, cfg.eval_episodes)
            curve.add(epoch, seed, ev["scores"])
            if ev["mean_score"] > best_seed.mean_score:
                best_seed = snapshot(epoch, ev["mean_score"])
            if progress is not None:
                progress(
                    {
                        "seed": seed,
                        "epoch": epoch,
                        "mean_score": ev["mean_score"],
                        "success_rate": ev["success_rate"],
                        **{k: v for k, v in diag.items() if k != "nan_guard"},
                    }
                )
        per_seed_best[seed] = best_seed
        if best_overall is None or best_seed.mean_score > best_overall.mean_score:
            best_overall = best_seed

    return TrainResult(curve=curve, best=best_overall, per_seed_best=per_seed_best)
