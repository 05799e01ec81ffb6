"""Synthetic two-view training loop driven by the weight scheduler.

Data are Gaussian latents observed through two independently-noised
views; the encoder is a single linear map trained by plain gradient
descent on the weighted two-view loss, while the scheduler's policy
picks the weights step by step.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .losses import (
    DEFAULT_OFFDIAG_WEIGHT,
    DEFAULT_TEMPERATURE,
    barlow_twins,
    info_nce,
)
from .scheduler import (
    PolicyParams,
    SchedulerConfig,
    Transition,
    init_policy,
    map_action,
    observe_state,
    policy_act,
    ppo_update,
    reward,
)

LOG_COLUMNS = ("step", "alpha", "beta", "reward", "loss_total", "loss_gen", "loss_dis")


@dataclass(frozen=True)
class LabConfig:
    steps: int
    input_dim: int = 16
    feature_dim: int = 8
    batch_size: int = 32
    noise_scale: float = 0.1
    learning_rate: float = 0.01
    seed: int = 0

    def __post_init__(self):
        for name in ("steps", "input_dim", "feature_dim", "batch_size", "seed"):
            value = getattr(self, name)
            if int(value) != value:
                raise ValidationError(f"{name} must be an integer, got {value}")
        if self.steps < 1:
            raise ValidationError(f"steps must be positive, got {self.steps}")
        if self.input_dim < 1:
            raise ValidationError(f"input_dim must be positive, got {self.input_dim}")
        if self.feature_dim < 2:
            raise ValidationError(
                f"feature_dim must be at least 2, got {self.feature_dim}"
            )
        if self.batch_size < 2:
            raise ValidationError(
                f"batch_size must be at least 2, got {self.batch_size}"
            )
        if not (math.isfinite(self.noise_scale) and self.noise_scale >= 0.0):
            raise ValidationError(f"noise_scale must be nonnegative, got {self.noise_scale}")
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0.0):
            raise ValidationError(
                f"learning_rate must be positive, got {self.learning_rate}"
            )


@dataclass(frozen=True)
class TrainingLog:
    """Per-step records (LOG_COLUMNS order) plus the trained artifacts."""

    records: np.ndarray
    final_weights: np.ndarray
    policy: PolicyParams

    @property
    def alphas(self) -> np.ndarray:
        return self.records[:, 1]

    @property
    def betas(self) -> np.ndarray:
        return self.records[:, 2]

    @property
    def rewards(self) -> np.ndarray:
        return self.records[:, 3]

    @property
    def losses(self) -> np.ndarray:
        return self.records[:, 4]


def gen_two_view_batch(rng: np.random.Generator, cfg: LabConfig):
    """Two noisy views of one batch of Gaussian latents."""
    latent = rng.standard_normal((cfg.batch_size, cfg.input_dim))
    x1 = latent + cfg.noise_scale * rng.standard_normal(latent.shape)
    x2 = latent + cfg.noise_scale * rng.standard_normal(latent.shape)
    return x1, x2


def encoder_forward(weights: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Linear encoder: one matrix, rows of x mapped to feature rows."""
    weights = np.asarray(weights, dtype=float)
    x = np.asarray(x, dtype=float)
    if weights.ndim != 2 or x.ndim != 2 or x.shape[1] != weights.shape[0]:
        raise ValidationError(
            f"cannot encode {x.shape} through weights {weights.shape}"
        )
    return x @ weights


def init_encoder(rng: np.random.Generator, cfg: LabConfig) -> np.ndarray:
    return rng.normal(
        0.0, 1.0 / math.sqrt(cfg.input_dim), (cfg.input_dim, cfg.feature_dim)
    )


def train_episode(
    cfg: LabConfig,
    sched_cfg: SchedulerConfig | None = None,
    temperature: float = DEFAULT_TEMPERATURE,
    epsilon: float = DEFAULT_OFFDIAG_WEIGHT,
    initial_policy: PolicyParams | None = None,
) -> TrainingLog:
    """Run one scheduled training episode.

    Per step: sample a two-view batch, encode, observe the batch-mean
    state, sample an action, map it to loss weights, take one encoder
    gradient step on the weighted loss, score the reward against the
    previous loss, and store the transition; the policy updates every
    update_period steps.  Fully deterministic given cfg.seed.
    """
    sched_cfg = sched_cfg or SchedulerConfig()
    rng = np.random.default_rng(cfg.seed)
    weights = init_encoder(rng, cfg)
    policy = initial_policy or init_policy(cfg.feature_dim, rng)
    if policy.state_dim != cfg.feature_dim:
        raise ValidationError(
            f"policy expects state size {policy.state_dim}, lab produces {cfg.feature_dim}"
        )
    records = np.empty((cfg.steps, len(LOG_COLUMNS)))
    buffer: list[Transition] = []
    loss_prev: float | None = None
    for step in range(cfg.steps):
        x1, x2 = gen_two_view_batch(rng, cfg)
        z1 = encoder_forward(weights, x1)
        z2 = encoder_forward(weights, x2)
        state = observe_state(np.vstack((z1, z2)))
        action, log_prob, value = policy_act(policy, state, rng)
        w = map_action(action, sched_cfg)
        loss_gen, (gi1, gi2) = info_nce(z1, z2, temperature)
        loss_dis, (gb1, gb2) = barlow_twins(z1, z2, epsilon)
        loss = w.alpha * loss_gen + w.beta * loss_dis
        g_z1 = w.alpha * gi1 + w.beta * gb1
        g_z2 = w.alpha * gi2 + w.beta * gb2
        weights = weights - cfg.learning_rate * (x1.T @ g_z1 + x2.T @ g_z2)
        r = reward(w, sched_cfg, loss, loss_prev)
        loss_prev = loss
        buffer.append(Transition(state, action, r, log_prob, value))
        if len(buffer) == sched_cfg.update_period:
            policy, _ = ppo_update(policy, buffer, sched_cfg)
            buffer = []
        records[step] = (step, w.alpha, w.beta, r, loss, loss_gen, loss_dis)
    return TrainingLog(records, weights, policy)


def write_training_log(log: TrainingLog, path) -> None:
    """Per-step CSV in LOG_COLUMNS order (the step column is integral)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LOG_COLUMNS)
        for row in log.records:
            writer.writerow([int(row[0])] + [repr(float(v)) for v in row[1:]])


def save_encoder_weights(weights: np.ndarray, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# encoder weights {weights.shape[0]} {weights.shape[1]}\n")
        for value in weights.ravel():
            fh.write(f"{float(value)!r}\n")
