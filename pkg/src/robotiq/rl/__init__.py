"""Policy-gradient navigation training (VPG and PPO)."""

from .algos import Updater, collect_rollouts, gae_advantages, pi_loss_and_grad
from .policy import PolicyParams, init_policy, mean_action, sample_action, value
from .train import (
    Checkpoint,
    LearningCurve,
    TrainConfig,
    TrainResult,
    evaluate,
    evaluate_params,
    train,
    transfer_eval,
)

__all__ = [
    "Updater",
    "collect_rollouts",
    "gae_advantages",
    "pi_loss_and_grad",
    "PolicyParams",
    "init_policy",
    "mean_action",
    "sample_action",
    "value",
    "Checkpoint",
    "LearningCurve",
    "TrainConfig",
    "TrainResult",
    "evaluate",
    "evaluate_params",
    "train",
    "transfer_eval",
]
