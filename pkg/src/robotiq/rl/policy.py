"""Actor-critic parameters and distribution heads.

The actor maps a box-normalized observation through a tanh MLP to either
categorical logits over the discrete turn-rate table or the mean of a
Gaussian turn rate (mean squashed into [omega_min, omega_max] by tanh, with
a state-independent learned log-std). The critic is a separate MLP.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..env import ActionSpec, ContinuousSpec, DiscreteSpec, action_spec_from_dict
from ..errors import CheckpointMismatchError
from .nets import init_layers, mlp_backward, mlp_forward

LOG_2PI = np.log(2.0 * np.pi)


@dataclass
class PolicyParams:
    obs_lo: np.ndarray
    obs_hi: np.ndarray
    hidden: tuple[int, ...]
    action: ActionSpec
    pi_layers: list
    v_layers: list
    log_std: np.ndarray  # shape (1,) for continuous heads, (0,) for discrete
    angle_dims: tuple[int, ...] = ()  # wrapped-angle dims fed to the net as (sin, cos)

    @property
    def obs_dim(self) -> int:
        return len(self.obs_lo)

    @property
    def discrete(self) -> bool:
        return isinstance(self.action, DiscreteSpec)

    def pi_param_arrays(self) -> list[np.ndarray]:
        out = []
        for W, b in self.pi_layers:
            out.extend((W, b))
        if not self.discrete:
            out.append(self.log_std)
        return out

    def v_param_arrays(self) -> list[np.ndarray]:
        out = []
        for W, b in self.v_layers:
            out.extend((W, b))
        return out

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.pi_param_arrays() + self.v_param_arrays())

    def copy(self) -> "PolicyParams":
        return PolicyParams(
            obs_lo=self.obs_lo.copy(),
            obs_hi=self.obs_hi.copy(),
            hidden=tuple(self.hidden),
            action=self.action,
            pi_layers=[[W.copy(), b.copy()] for W, b in self.pi_layers],
            v_layers=[[W.copy(), b.copy()] for W, b in self.v_layers],
            log_std=self.log_std.copy(),
            angle_dims=tuple(self.angle_dims),
        )

    def to_dict(self) -> dict:
        return {
            "obs_lo": self.obs_lo.tolist(),
            "obs_hi": self.obs_hi.tolist(),
            "hidden": list(self.hidden),
            "action": self.action.to_dict(),
            "pi_layers": [[W.tolist(), b.tolist()] for W, b in self.pi_layers],
            "v_layers": [[W.tolist(), b.tolist()] for W, b in self.v_layers],
            "log_std": self.log_std.tolist(),
            "angle_dims": list(self.angle_dims),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PolicyParams":
        return cls(
            obs_lo=np.asarray(d["obs_lo"], dtype=np.float64),
            obs_hi=np.asarray(d["obs_hi"], dtype=np.float64),
            hidden=tuple(d["hidden"]),
            action=action_spec_from_dict(d["action"]),
            pi_layers=[[np.asarray(W, dtype=np.float64), np.asarray(b, dtype=np.float64)]
                       for W, b in d["pi_layers"]],
            v_layers=[[np.asarray(W, dtype=np.float64), np.asarray(b, dtype=np.float64)]
                      for W, b in d["v_layers"]],
            log_std=np.asarray(d["log_std"], dtype=np.float64),
            angle_dims=tuple(d.get("angle_dims", ())),
        )


def init_policy(
    obs_lo: np.ndarray,
    obs_hi: np.ndarray,
    action: ActionSpec,
    rng: np.random.Generator,
    hidden: tuple[int, ...] = (64, 64),
    init_log_std: float = -0.5,
    angle_dims: tuple[int, ...] = (),
) -> PolicyParams:
    obs_dim = len(obs_lo)
    in_width = obs_dim + len(angle_dims)  # each angle dim becomes (sin, cos)
    head = action.n_actions if isinstance(action, DiscreteSpec) else 1
    pi_layers = init_layers([in_width, *hidden, head], rng, final_scale=0.01)
    v_layers = init_layers([in_width, *hidden, 1], rng)
    log_std = np.array([init_log_std]) if isinstance(action, ContinuousSpec) else np.zeros(0)
    return PolicyParams(
        obs_lo=np.asarray(obs_lo, dtype=np.float64),
        obs_hi=np.asarray(obs_hi, dtype=np.float64),
        hidden=tuple(hidden),
        action=action,
        pi_layers=pi_layers,
        v_layers=v_layers,
        log_std=log_std,
        angle_dims=tuple(angle_dims),
    )


def featurize_obs(params: PolicyParams, obs: np.ndarray) -> np.ndarray:
    """Network input features for a batch of raw observations.

    Non-angle dims are box-normalized into [-1, 1]; wrapped-angle dims are
    replaced by their (sin, cos) pair so the net never sees the +/-pi seam.
    """
    x = 2.0 * (obs - params.obs_lo) / (params.obs_hi - params.obs_lo) - 1.0
    if not params.angle_dims:
        return x
    idx = list(params.angle_dims)
    keep = [i for i in range(obs.shape[1]) if i not in set(idx)]
    ang = obs[:, idx]
    return np.concatenate([x[:, keep], np.sin(ang), np.cos(ang)], axis=1)


def _omega_bounds(action: ContinuousSpec) -> tuple[float, float]:
    mid = 0.5 * (action.omega_min + action.omega_max)
    half = 0.5 * (action.omega_max - action.omega_min)
    return mid, half


def pi_forward(params: PolicyParams, obs: np.ndarray):
    """Head output plus the activation cache needed for backprop."""
    x = featurize_obs(params, np.atleast_2d(obs))
    out, acts = mlp_forward(params.pi_layers, x)
    return out, acts


def logits_logp(logits: np.ndarray, actions: np.ndarray):
    """Categorical log-probabilities of the taken actions plus softmax probs."""
    z = logits - logits.max(axis=1, keepdims=True)
    expz = np.exp(z)
    sumz = expz.sum(axis=1, keepdims=True)
    logZ = np.log(sumz) + logits.max(axis=1, keepdims=True)
    probs = expz / sumz
    logp = logits[np.arange(len(actions)), actions] - logZ[:, 0]
    return logp, probs


def gaussian_stats(params: PolicyParams, raw: np.ndarray):
    """(mu, sigma, tanh_raw) of the squashed-mean Gaussian head."""
    mid, half = _omega_bounds(params.action)
    t = np.tanh(raw[:, 0])
    mu = mid + half * t
    sigma = float(np.exp(params.log_std[0]))
    return mu, sigma, t


def gaussian_logp(mu: np.ndarray, sigma: float, actions: np.ndarray) -> np.ndarray:
    z = (actions - mu) / sigma
    return -0.5 * z * z - np.log(sigma) - 0.5 * LOG_2PI


def action_logp(params: PolicyParams, obs: np.ndarray, actions: np.ndarray) -> np.ndarray:
    out, _ = pi_forward(params, obs)
    if params.discrete:
        logp, _ = logits_logp(out, actions.astype(int))
        return logp
    mu, sigma, _ = gaussian_stats(params, out)
    return gaussian_logp(mu, sigma, actions)


def sample_action(params: PolicyParams, obs: np.ndarray, rng: np.random.Generator):
    """One stochastic action and its log-probability."""
    out, _ = pi_forward(params, obs)
    if params.discrete:
        _, probs = logits_logp(out, np.zeros(1, dtype=int))
        u = rng.random()
        a = int(np.searchsorted(np.cumsum(probs[0]), u))
        a = min(a, probs.shape[1] - 1)
        logp, _ = logits_logp(out, np.array([a]))
        return a, float(logp[0])
    mu, sigma, _ = gaussian_stats(params, out)
    a = float(mu[0] + sigma * rng.standard_normal())
    return a, float(gaussian_logp(mu, sigma, np.array([a]))[0])


def mean_action(params: PolicyParams, obs: np.ndarray):
    """Deterministic action: categorical mode, or the squashed Gaussian mean."""
    out, _ = pi_forward(params, obs)
    if params.discrete:
        return int(np.argmax(out[0]))
    mu, _, _ = gaussian_stats(params, out)
    return float(mu[0])


def value(params: PolicyParams, obs: np.ndarray) -> np.ndarray:
    x = featurize_obs(params, np.atleast_2d(obs))
    out, _ = mlp_forward(params.v_layers, x)
    return out[:, 0]


def value_loss_and_grad(params: PolicyParams, obs: np.ndarray, returns: np.ndarray):
    """MSE value regression loss and gradients over v_param_arrays order."""
    x = featurize_obs(params, np.atleast_2d(obs))
    out, acts = mlp_forward(params.v_layers, x)
    err = out[:, 0] - returns
    loss = float(np.mean(err * err))
    dout = (2.0 * err / len(err))[:, None]
    layer_grads = mlp_backward(params.v_layers, acts, dout)
    grads = []
    for gW, gb in layer_grads:
        grads.extend((gW, gb))
    return loss, grads


def save_checkpoint_dict(d: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(d, fh)


def load_checkpoint_dict(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def check_fingerprint(expected: dict, actual: dict) -> None:
    if expected != actual:
        raise CheckpointMismatchError(
            f"checkpoint trained for {expected}, environment provides {actual}"
        )
