"""Reinforcement-learning scheduler that steers the two loss weights.

A small Gaussian policy with tanh-squashed actions observes the mean
feature vector of the current batch and proposes an action pair; the
action is shifted by a fixed center to become the loss weights.  The
reward prefers weight pairs aligned with a target direction (the
game's interior fixed point) plus a capped bonus for keeping the
training loss steady.  Updates use the clipped-surrogate objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .losses import LossWeights

#: Weights are clamped to [0, 2 * center] and floored here so LossWeights
#: stays constructible.
WEIGHT_FLOOR = 1e-3

# Update hyper-parameters (standard clipped-surrogate settings).
CLIP_EPS = 0.2
DISCOUNT = 0.99
LEARNING_RATE = 3e-4
HIDDEN_UNITS = 32
LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0
LOG_STD_INIT = -1.0

_ATANH_LIMIT = 1.0 - 1e-7
_SQUASH_EPS = 1e-8
_ADV_EPS = 1e-8
_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SchedulerConfig:
    """Scheduler knobs.

    center: midpoint of the attainable weight range [0, 2 * center].
    explore_weight: scale of the loss-stability bonus.
    prev_loss_scale: factor on the previous loss inside the bonus.
    target: direction the weight pair should align with.
    update_period: steps collected between policy updates.
    reward_cap / denom_floor: guards on the reciprocal bonus.
    """

    center: float = 0.5
    explore_weight: float = 0.1
    prev_loss_scale: float = 1.0
    target: tuple[float, float] = (0.85, 0.87)
    update_period: int = 200
    reward_cap: float = 100.0
    denom_floor: float = 1e-6

    def __post_init__(self):
        for name in ("center", "explore_weight", "prev_loss_scale",
                     "reward_cap", "denom_floor"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        if self.center <= 0.0:
            raise ValidationError(f"center must be positive, got {self.center}")
        if self.explore_weight < 0.0 or self.prev_loss_scale < 0.0:
            raise ValidationError("explore_weight and prev_loss_scale must be nonnegative")
        if int(self.update_period) != self.update_period or self.update_period < 1:
            raise ValidationError(
                f"update_period must be a positive integer, got {self.update_period}"
            )
        tx, ty = self.target
        if not (math.isfinite(tx) and math.isfinite(ty)):
            raise ValidationError("target must be finite")
        if tx < 0.0 or ty < 0.0 or (tx == 0.0 and ty == 0.0):
            raise ValidationError(f"target must be nonnegative and nonzero, got {self.target}")
        if self.reward_cap <= 0.0 or self.denom_floor <= 0.0:
            raise ValidationError("reward_cap and denom_floor must be positive")


@dataclass(frozen=True)
class Transition:
    """One step of experience as stored in the update buffer."""

    state: np.ndarray
    action: np.ndarray
    reward: float
    log_prob: float
    value: float

    def __post_init__(self):
        if not (
            np.all(np.isfinite(self.state))
            and np.all(np.isfinite(self.action))
            and math.isfinite(self.reward)
            and math.isfinite(self.log_prob)
            and math.isfinite(self.value)
        ):
            raise ValidationError("transition fields must be finite")


@dataclass(frozen=True)
class PolicyParams:
    """Two-layer action-mean network, two-layer value network, and a
    learnable per-dimension log standard deviation (kept in
    [LOG_STD_MIN, LOG_STD_MAX])."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    vw1: np.ndarray
    vb1: np.ndarray
    vw2: np.ndarray
    vb2: float
    log_std: np.ndarray

    @property
    def state_dim(self) -> int:
        return self.w1.shape[0]

    @property
    def hidden(self) -> int:
        return self.w1.shape[1]


def init_policy(state_dim: int, rng: np.random.Generator, hidden: int = HIDDEN_UNITS) -> PolicyParams:
    """Fresh policy; output heads start near zero so the initial action
    mean sits at the center of the weight range."""
    if state_dim < 1 or hidden < 1:
        raise ValidationError("state_dim and hidden must be positive")
    scale_in = 1.0 / math.sqrt(state_dim)
    scale_h = 1.0 / math.sqrt(hidden)
    return PolicyParams(
        w1=rng.normal(0.0, scale_in, (state_dim, hidden)),
        b1=np.zeros(hidden),
        w2=rng.normal(0.0, 0.01 * scale_h, (hidden, 2)),
        b2=np.zeros(2),
        vw1=rng.normal(0.0, scale_in, (state_dim, hidden)),
        vb1=np.zeros(hidden),
        vw2=rng.normal(0.0, 0.01 * scale_h, hidden),
        vb2=0.0,
        log_std=np.full(2, LOG_STD_INIT),
    )


def observe_state(features) -> np.ndarray:
    """Per-dimension mean of a feature batch."""
    z = np.asarray(features, dtype=float)
    if z.ndim != 2 or z.shape[0] < 1:
        raise ValidationError("observe_state needs a nonempty 2-D batch")
    if not np.all(np.isfinite(z)):
        raise ValidationError("features must be finite")
    return z.mean(axis=0)


def map_action(action, cfg: SchedulerConfig) -> LossWeights:
    """Shift a squashed action pair by the weight center and clamp.

    Action components are expected in [-1, 1]; the result is clamped to
    [0, 2 * center] and floored at WEIGHT_FLOOR.
    """
    a = np.asarray(action, dtype=float)
    if a.shape != (2,):
        raise ValidationError(f"action must be a pair, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("action must be finite")
    w = np.clip(cfg.center + a, 0.0, 2.0 * cfg.center)
    w = np.maximum(w, WEIGHT_FLOOR)
    return LossWeights(float(w[0]), float(w[1]))


def reward(
    weights: LossWeights,
    cfg: SchedulerConfig,
    loss_t: float,
    loss_prev: float | None = None,
) -> float:
    """Alignment-plus-stability reward.

    First term: cosine between the weight pair and the target direction.
    Second term (absent on the first step, when loss_prev is None): the
    capped reciprocal of the loss change, scaled by explore_weight.
    """
    if not math.isfinite(loss_t):
        raise ValidationError(f"loss_t must be finite, got {loss_t}")
    w = np.array([weights.alpha, weights.beta])
    t = np.asarray(cfg.target, dtype=float)
    first = float(w @ t / (np.linalg.norm(w) * np.linalg.norm(t)))
    if loss_prev is None:
        return first
    if not math.isfinite(loss_prev):
        raise ValidationError(f"loss_prev must be finite, got {loss_prev}")
    denom = max(abs(loss_t - cfg.prev_loss_scale * loss_prev), cfg.denom_floor)
    second = cfg.explore_weight * min(1.0 / denom, cfg.reward_cap)
    return first + second


def _clipped_log_std(policy: PolicyParams) -> np.ndarray:
    return np.clip(policy.log_std, LOG_STD_MIN, LOG_STD_MAX)


def _policy_mean(policy: PolicyParams, states: np.ndarray):
    h = np.tanh(states @ policy.w1 + policy.b1)
    return h @ policy.w2 + policy.b2, h


def _value(policy: PolicyParams, states: np.ndarray):
    hv = np.tanh(states @ policy.vw1 + policy.vb1)
    return hv @ policy.vw2 + policy.vb2, hv


def _squashed_log_prob(raw, mu, log_std, action):
    z = (raw - mu) / np.exp(log_std)
    gauss = np.sum(-0.5 * z**2 - log_std - 0.5 * _LOG_2PI, axis=-1)
    correction = np.sum(np.log(1.0 - action**2 + _SQUASH_EPS), axis=-1)
    return gauss - correction


def policy_act(policy: PolicyParams, state, rng: np.random.Generator):
    """Sample a squashed action for one state.

    Returns (action, log_prob, value); deterministic given the rng.
    """
    s = np.asarray(state, dtype=float)
    if s.shape != (policy.state_dim,):
        raise ValidationError(
            f"state has shape {s.shape}, policy expects ({policy.state_dim},)"
        )
    if not np.all(np.isfinite(s)):
        raise ValidationError("state must be finite")
    mu, _ = _policy_mean(policy, s)
    log_std = _clipped_log_std(policy)
    raw = mu + np.exp(log_std) * rng.standard_normal(2)
    action = np.tanh(raw)
    log_prob = float(_squashed_log_prob(raw, mu, log_std, action))
    value, _ = _value(policy, s)
    return action, log_prob, float(value)


def clipped_objective(ratio, advantage, clip_eps: float = CLIP_EPS):
    """Elementwise clipped-surrogate objective min(r A, clip(r) A)."""
    ratio = np.asarray(ratio, dtype=float)
    advantage = np.asarray(advantage, dtype=float)
    return np.minimum(
        ratio * advantage,
        np.clip(ratio, 1.0 - clip_eps, 1.0 + clip_eps) * advantage,
    )


def discounted_returns(rewards: np.ndarray, discount: float = DISCOUNT) -> np.ndarray:
    returns = np.empty(len(rewards))
    acc = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        acc = rewards[t] + discount * acc
        returns[t] = acc
    return returns


def ppo_update(policy: PolicyParams, buffer, cfg: SchedulerConfig):
    """One clipped-surrogate update over a full buffer (single epoch,
    plain gradient step).  Returns (new_policy, stats).

    Advantages are discounted reward-to-go minus the stored value
    estimates, normalized over the buffer.  The value network regresses
    toward the returns; it shares no parameters with the action mean, so
    a zero-advantage buffer leaves the action distribution untouched.
    """
    buffer = list(buffer)
    if not buffer:
        raise ValidationError("update buffer is empty")
    if len(buffer) != cfg.update_period:
        raise ValidationError(
            f"buffer holds {len(buffer)} transitions, expected update_period = {cfg.update_period}"
        )
    states = np.stack([tr.state for tr in buffer])
    actions = np.stack([tr.action for tr in buffer])
    rewards = np.array([tr.reward for tr in buffer])
    old_logp = np.array([tr.log_prob for tr in buffer])
    values = np.array([tr.value for tr in buffer])
    if states.shape[1] != policy.state_dim:
        raise ValidationError("buffer states do not match the policy's input size")
    n = len(buffer)

    returns = discounted_returns(rewards)
    adv = returns - values
    adv = (adv - adv.mean()) / (adv.std() + _ADV_EPS)

    log_std = _clipped_log_std(policy)
    std = np.exp(log_std)
    mu, h = _policy_mean(policy, states)
    raw = np.arctanh(np.clip(actions, -_ATANH_LIMIT, _ATANH_LIMIT))
    new_logp = _squashed_log_prob(raw, mu, log_std, actions)
    ratio = np.exp(new_logp - old_logp)

    unclipped = ratio * adv
    clipped = np.clip(ratio, 1.0 - CLIP_EPS, 1.0 + CLIP_EPS) * adv
    objective = np.minimum(unclipped, clipped)
    policy_loss = -float(objective.mean())
    # gradient flows only through samples where the unclipped branch wins
    active = unclipped <= clipped
    dl_dlogp = -(active * ratio * adv) / n

    z = (raw - mu) / std
    g_mu = dl_dlogp[:, None] * (z / std)
    g_log_std = np.sum(dl_dlogp[:, None] * (z**2 - 1.0), axis=0)

    g_w2 = h.T @ g_mu
    g_b2 = g_mu.sum(axis=0)
    g_h = (g_mu @ policy.w2.T) * (1.0 - h**2)
    g_w1 = states.T @ g_h
    g_b1 = g_h.sum(axis=0)

    v_pred, hv = _value(policy, states)
    v_err = v_pred - returns
    value_loss = 0.5 * float(np.mean(v_err**2))
    g_v = v_err / n
    g_vw2 = hv.T @ g_v
    g_vb2 = float(g_v.sum())
    g_hv = np.outer(g_v, policy.vw2) * (1.0 - hv**2)
    g_vw1 = states.T @ g_hv
    g_vb1 = g_hv.sum(axis=0)

    lr = LEARNING_RATE
    new_policy = PolicyParams(
        w1=policy.w1 - lr * g_w1,
        b1=policy.b1 - lr * g_b1,
        w2=policy.w2 - lr * g_w2,
        b2=policy.b2 - lr * g_b2,
        vw1=policy.vw1 - lr * g_vw1,
        vb1=policy.vb1 - lr * g_vb1,
        vw2=policy.vw2 - lr * g_vw2,
        vb2=policy.vb2 - lr * g_vb2,
        log_std=np.clip(log_std - lr * g_log_std, LOG_STD_MIN, LOG_STD_MAX),
    )
    stats = {
        "policy_loss": policy_loss,
        "value_loss": value_loss,
        "clip_fraction": float(np.mean(unclipped > clipped)),
        "mean_ratio": float(ratio.mean()),
    }
    return new_policy, stats


_POLICY_MAGIC = "evoloss-policy"
_POLICY_VERSION = 1


def _policy_fields(policy: PolicyParams):
    return (
        policy.w1,
        policy.b1,
        policy.w2,
        policy.b2,
        policy.vw1,
        policy.vb1,
        policy.vw2,
        np.array([policy.vb2]),
        policy.log_std,
    )


def save_policy(policy: PolicyParams, path) -> None:
    """Flat text checkpoint: a version header, then one value per line."""
    flat = np.concatenate([f.ravel() for f in _policy_fields(policy)])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{_POLICY_MAGIC} {_POLICY_VERSION} {policy.state_dim} {policy.hidden}\n")
        for value in flat:
            fh.write(f"{float(value)!r}\n")


def load_policy(path) -> PolicyParams:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise ValidationError("empty checkpoint file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != _POLICY_MAGIC:
        raise ValidationError(f"not a policy checkpoint: {lines[0]!r}")
    if int(head[1]) != _POLICY_VERSION:
        raise ValidationError(f"unsupported checkpoint version {head[1]}")
    state_dim, hidden = int(head[2]), int(head[3])
    try:
        flat = np.array([float(v) for v in lines[1:] if v.strip()])
    except ValueError:
        raise ValidationError("checkpoint contains a non-numeric value") from None
    shapes = (
        (state_dim, hidden),
        (hidden,),
        (hidden, 2),
        (2,),
        (state_dim, hidden),
        (hidden,),
        (hidden,),
        (1,),
        (2,),
    )
    expected = sum(int(np.prod(s)) for s in shapes)
    if len(flat) != expected:
        raise ValidationError(
            f"checkpoint holds {len(flat)} values, expected {expected}"
        )
    parts = []
    offset = 0
    for shape in shapes:
        size = int(np.prod(shape))
        parts.append(flat[offset : offset + size].reshape(shape))
        offset += size
    return PolicyParams(
        w1=parts[0],
        b1=parts[1],
        w2=parts[2],
        b2=parts[3],
        vw1=parts[4],
        vb1=parts[5],
        vw2=parts[6],
        vb2=float(parts[7][0]),
        log_std=parts[8],
    )
