"""On-policy machinery: GAE, rollout collection, VPG and PPO updates."""

from __future__ import annotations

import numpy as np

from ..env import Event, NavEnv
from .nets import Adam, mlp_backward
from .policy import (
    LOG_2PI,
    PolicyParams,
    gaussian_logp,
    gaussian_stats,
    logits_logp,
    pi_forward,
    sample_action,
    value,
    value_loss_and_grad,
)


def gae_advantages(rewards, values, last_value, gamma, lam):
    """Generalized advantage estimates over one contiguous segment.

    `last_value` is the bootstrap for the state after the final transition
    (0 at true terminals, V(s_T) at cuts/truncations). Returns (adv, ret)
    with ret = adv + values, the lambda-return regression target.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    T = len(rewards)
    adv = np.zeros(T)
    next_value = last_value
    running = 0.0
    for t in reversed(range(T)):
        delta = rewards[t] + gamma * next_value - values[t]
        running = delta + gamma * lam * running
        adv[t] = running
        next_value = values[t]
    return adv, adv + values


def collect_rollouts(env: NavEnv, params: PolicyParams, steps: int, rng: np.random.Generator,
                     gamma: float, lam: float, reward_scale: float = 1.0) -> dict:
    """Exactly `steps` on-policy transitions; the trailing partial episode is
    cut and bootstrapped with its value estimate.

    `reward_scale` multiplies rewards entering GAE and the value targets
    (critic conditioning only; episode returns are reported unscaled, and
    normalized advantages are invariant to the scale).
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    obs_buf = np.zeros((steps, params.obs_dim))
    act_buf = np.zeros(steps, dtype=np.float64)
    logp_buf = np.zeros(steps)
    rew_buf = np.zeros(steps)
    val_buf = np.zeros(steps)
    done_buf = np.zeros(steps, dtype=bool)
    adv_buf = np.zeros(steps)
    ret_buf = np.zeros(steps)

    ep_returns: list[float] = []
    ep_lengths: list[int] = []
    ep_events: list[str] = []

    obs_vec = (env.reset() if env.done else env.current_observation()).as_vector()
    seg_start = 0
    ep_return = 0.0
    ep_len = 0
    for t in range(steps):
        a, logp = sample_action(params, obs_vec, rng)
        v = float(value(params, obs_vec)[0])
        res = env.step(a)
        obs_buf[t] = obs_vec
        act_buf[t] = a
        logp_buf[t] = logp
        rew_buf[t] = res.reward * reward_scale
        val_buf[t] = v
        done_buf[t] = res.done
        ep_return += res.reward
        ep_len += 1
        obs_vec = res.observation.as_vector()

        if res.done or t == steps - 1:
            if res.event in (Event.GOAL, Event.COLLISION):
                last_value = 0.0
            else:  # timeout truncation or buffer cut: bootstrap
                last_value = float(value(params, obs_vec)[0])
            seg = slice(seg_start, t + 1)
            adv_buf[seg], ret_buf[seg] = gae_advantages(
                rew_buf[seg], val_buf[seg], last_value, gamma, lam
            )
            if res.done:
                ep_returns.append(ep_return)
                ep_lengths.append(ep_len)
                ep_events.append(res.event.value)
                ep_return = 0.0
                ep_len = 0
                if t < steps - 1:
                    obs_vec = env.reset().as_vector()
            seg_start = t + 1

    return {
        "obs": obs_buf,
        "act": act_buf,
        "logp": logp_buf,
        "rew": rew_buf,
        "val": val_buf,
        "done": done_buf,
        "adv": adv_buf,
        "ret": ret_buf,
        "ep_returns": np.asarray(ep_returns),
        "ep_lengths": np.asarray(ep_lengths),
        "ep_events": ep_events,
    }


def pi_loss_and_grad(params: PolicyParams, obs, actions, adv, *, algo: str,
                     old_logp=None, clip_ratio: float = 0.2, ent_coef: float = 0.0):
    """Policy loss and gradients (over pi_param_arrays order) for VPG or PPO.

    VPG: L = -mean(adv * logp). PPO: clipped surrogate; at the clip boundary
    the clipped (zero-gradient) branch is taken.
    """
    obs = np.atleast_2d(obs)
    adv = np.asarray(adv, dtype=np.float64)
    B = len(adv)
    out, acts = pi_forward(params, obs)
    stats: dict = {}

    if params.discrete:
        a_idx = np.asarray(actions, dtype=int)
        logp, probs = logits_logp(out, a_idx)
    else:
        a_val = np.asarray(actions, dtype=np.float64)
        mu, sigma, tanh_raw = gaussian_stats(params, out)
        logp = gaussian_logp(mu, sigma, a_val)

    if algo == "vpg":
        loss = -float(np.mean(adv * logp))
        dlogp = -adv / B
    elif algo == "ppo":
        if old_logp is None:
            raise ValueError("PPO needs old_logp")
        old_logp = np.asarray(old_logp, dtype=np.float64)
        ratio = np.exp(logp - old_logp)
        unclipped = ratio * adv
        clipped = np.clip(ratio, 1.0 - clip_ratio, 1.0 + clip_ratio) * adv
        loss = -float(np.mean(np.minimum(unclipped, clipped)))
        # Gradient dies only on the flat clipped branch; at the boundary
        # itself the flat branch is taken.
        clip_active = ((adv > 0) & (ratio >= 1.0 + clip_ratio)) | (
            (adv < 0) & (ratio <= 1.0 - clip_ratio)
        )
        dlogp = np.where(clip_active, 0.0, -ratio * adv / B)
        stats["clip_frac"] = float(np.mean(clip_active))
        stats["approx_kl"] = float(np.mean(old_logp - logp))
    else:
        raise ValueError(f"unknown algorithm {algo!r}")

    if params.discrete:
        onehot = np.zeros_like(probs)
        onehot[np.arange(B), a_idx] = 1.0
        dout = dlogp[:, None] * (onehot - probs)
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(probs > 0, probs * np.log(probs), 0.0)
        entropy = float(np.mean(-plogp.sum(axis=1)))
        if ent_coef != 0.0:
            H = -plogp.sum(axis=1)
            logp_all = np.where(probs > 0, np.log(probs), 0.0)
            dH = -probs * (logp_all + H[:, None])
            loss -= ent_coef * entropy
            dout -= ent_coef * dH / B
        layer_grads = mlp_backward(params.pi_layers, acts, dout)
        grads = []
        for gW, gb in layer_grads:
            grads.extend((gW, gb))
    else:
        dmu = dlogp * (a_val - mu) / (sigma * sigma)
        mid_half = 0.5 * (params.action.omega_max - params.action.omega_min)
        dout = (dmu * mid_half * (1.0 - tanh_raw**2))[:, None]
        z2 = ((a_val - mu) / sigma) ** 2
        dlog_std = float(np.sum(dlogp * (z2 - 1.0)))
        entropy = float(params.log_std[0] + 0.5 * (1.0 + LOG_2PI))
        if ent_coef != 0.0:
            loss -= ent_coef * entropy
            dlog_std -= ent_coef
        layer_grads = mlp_backward(params.pi_layers, acts, dout)
        grads = []
        for gW, gb in layer_grads:
            grads.extend((gW, gb))
        grads.append(np.array([dlog_std]))

    stats["entropy"] = entropy
    stats["logp"] = logp
    return loss, grads, stats


def normalized_advantages(adv: np.ndarray) -> np.ndarray:
    return (adv - adv.mean()) / (adv.std() + 1e-8)


class Updater:
    """Owns the optimizer state; applies one epoch's update to the params."""

    def __init__(self, params: PolicyParams, cfg, rng: np.random.Generator):
        self.params = params
        self.cfg = cfg
        self.rng = rng
        self.pi_opt = Adam(params.pi_param_arrays(), lr=cfg.pi_lr)
        self.v_opt = Adam(params.v_param_arrays(), lr=cfg.v_lr)

    def _finite(self, loss: float, grads) -> bool:
        return np.isfinite(loss) and all(np.all(np.isfinite(g)) for g in grads)

    def update(self, batch: dict) -> dict:
        cfg = self.cfg
        params = self.params
        obs, act, ret = batch["obs"], batch["act"], batch["ret"]
        adv = normalized_advantages(batch["adv"])
        diag: dict = {"nan_guard": False}

        if cfg.algorithm == "vpg":
            loss, grads, stats = pi_loss_and_grad(
                params, obs, act, adv, algo="vpg", ent_coef=cfg.ent_coef
            )
            if not self._finite(loss, grads):
                diag["nan_guard"] = True
                return diag
            self.pi_opt.step(grads)
            diag["pi_loss"] = loss
        elif cfg.algorithm == "ppo":
            old_logp = batch["logp"]
            B = len(act)
            mb = min(cfg.minibatch_size, B)
            stop = False
            for it in range(cfg.train_iters):
                order = self.rng.permutation(B)
                for lo in range(0, B, mb):
                    idx = order[lo : lo + mb]
                    loss, grads, stats = pi_loss_and_grad(
                        params, obs[idx], act[idx], adv[idx], algo="ppo",
                        old_logp=old_logp[idx], clip_ratio=cfg.clip_ratio,
                        ent_coef=cfg.ent_coef,
                    )
                    if not self._finite(loss, grads):
                        diag["nan_guard"] = True
                        return diag
                    self.pi_opt.step(grads)
                full_logp = _batch_logp(params, obs, act)
                kl = float(np.mean(old_logp - full_logp))
                diag["approx_kl"] = kl
                diag["pi_loss"] = loss
                if cfg.target_kl is not None and kl > 1.5 * cfg.target_kl:
                    diag["early_stop_iter"] = it + 1
                    stop = True
                    break
            if not stop:
                diag["early_stop_iter"] = cfg.train_iters
        else:
            raise ValueError(f"unknown algorithm {cfg.algorithm!r}")

        for _ in range(cfg.value_iters):
            v_loss, v_grads = value_loss_and_grad(params, obs, ret)
            if not self._finite(v_loss, v_grads):
                diag["nan_guard"] = True
                return diag
            self.v_opt.step(v_grads)
        diag["v_loss"] = v_loss
        diag["entropy"] = stats.get("entropy")
        return diag


def _batch_logp(params: PolicyParams, obs, act) -> np.ndarray:
    out, _ = pi_forward(params, obs)
    if params.discrete:
        logp, _ = logits_logp(out, np.asarray(act, dtype=int))
        return logp
    mu, sigma, _ = gaussian_stats(params, out)
    return gaussian_logp(mu, sigma, np.asarray(act, dtype=np.float64))
