"""Synthetic two-view training loop: data generation, encoder gradients,
scheduler integration, determinism, and log output."""

import math
import time

import numpy as np
import pytest

from evoloss import (
    LabConfig,
    SchedulerConfig,
    ValidationError,
    encoder_forward,
    ensemble_loss,
    gen_two_view_batch,
    init_policy,
    train_episode,
    write_training_log,
)
from evoloss.lab import LOG_COLUMNS, init_encoder
from evoloss.scheduler import PolicyParams

from helpers import cosine


def pinned_policy(state_dim, weights, hidden=4):
    """Policy that (almost) deterministically maps to the given weights."""
    mean = np.arctanh(np.asarray(weights, dtype=float) - 0.5)
    return PolicyParams(
        w1=np.zeros((state_dim, hidden)),
        b1=np.zeros(hidden),
        w2=np.zeros((hidden, 2)),
        b2=mean,
        vw1=np.zeros((state_dim, hidden)),
        vb1=np.zeros(hidden),
        vw2=np.zeros(hidden),
        vb2=0.0,
        log_std=np.full(2, -5.0),
    )


@pytest.mark.parametrize(
    "kwargs",
    [
        {"steps": 0},
        {"steps": 10, "input_dim": 0},
        {"steps": 10, "feature_dim": 1},
        {"steps": 10, "batch_size": 1},
        {"steps": 10, "noise_scale": -0.1},
        {"steps": 10, "learning_rate": 0.0},
        {"steps": 2.5},
    ],
)
def test_lab_config_validation(kwargs):
    with pytest.raises(ValidationError):
        LabConfig(**kwargs)


def test_gen_two_view_batch_zero_noise_gives_identical_views():
    cfg = LabConfig(steps=1, noise_scale=0.0)
    x1, x2 = gen_two_view_batch(np.random.default_rng(0), cfg)
    np.testing.assert_array_equal(x1, x2)
    assert x1.shape == (cfg.batch_size, cfg.input_dim)


def test_gen_two_view_batch_noise_variance():
    cfg = LabConfig(steps=1, batch_size=2000, input_dim=4, noise_scale=0.1)
    x1, x2 = gen_two_view_batch(np.random.default_rng(1), cfg)
    # the difference of the two views has variance 2 * noise_scale^2
    var = float(np.var(x1 - x2))
    assert abs(var - 0.02) < 0.002


def test_encoder_forward():
    w = np.eye(3)
    x = np.arange(6.0).reshape(2, 3)
    np.testing.assert_array_equal(encoder_forward(w, x), x)
    np.testing.assert_array_equal(encoder_forward(np.zeros((3, 2)), x), np.zeros((2, 2)))
    with pytest.raises(ValidationError):
        encoder_forward(np.zeros((4, 2)), x)


def test_init_encoder_shape_and_scale():
    cfg = LabConfig(steps=1, input_dim=100, feature_dim=6)
    w = init_encoder(np.random.default_rng(0), cfg)
    assert w.shape == (100, 6)
    assert abs(float(w.std()) - 0.1) < 0.02  # 1/sqrt(input_dim)


def test_encoder_weight_gradient_matches_finite_differences(rng):
    """The chain rule used for the weight update: dL/dW = x1'g1 + x2'g2."""
    x1 = rng.standard_normal((6, 4))
    x2 = rng.standard_normal((6, 4))
    w = rng.standard_normal((4, 3)) * 0.5
    weights = (0.6, 0.4)

    def loss_of(wm):
        return ensemble_loss(x1 @ wm, x2 @ wm, weights)[0]

    _, (g1, g2) = ensemble_loss(x1 @ w, x2 @ w, weights)
    analytic = x1.T @ g1 + x2.T @ g2
    numeric = np.zeros_like(w)
    h = 1e-6
    for idx in np.ndindex(w.shape):
        wp = w.copy()
        wp[idx] += h
        wm_ = w.copy()
        wm_[idx] -= h
        numeric[idx] = (loss_of(wp) - loss_of(wm_)) / (2.0 * h)
    err = np.linalg.norm(numeric - analytic) / np.linalg.norm(analytic)
    assert err < 1e-4


def test_train_episode_with_pinned_policy():
    """A near-deterministic policy pins the logged weights, so every step's
    weight pair points along the pinned direction."""
    target_weights = (0.35, 0.37)
    cfg = LabConfig(steps=50, input_dim=8, feature_dim=4, batch_size=16, seed=9)
    sched = SchedulerConfig(update_period=1000)  # never updates in 50 steps
    log = train_episode(cfg, sched, initial_policy=pinned_policy(4, target_weights))
    assert log.records.shape == (50, len(LOG_COLUMNS))
    np.testing.assert_array_equal(log.records[:, 0], np.arange(50))
    assert abs(float(log.alphas.mean()) - 0.35) < 5e-3
    assert abs(float(log.betas.mean()) - 0.37) < 5e-3
    for alpha, beta in zip(log.alphas, log.betas):
        assert cosine((alpha, beta), target_weights) > 0.998
    # the total is the weighted sum of the component losses
    np.testing.assert_allclose(
        log.records[:, 4],
        log.alphas * log.records[:, 5] + log.betas * log.records[:, 6],
        rtol=1e-12,
    )


def test_train_episode_loss_decreases():
    cfg = LabConfig(steps=600, seed=1)
    log = train_episode(cfg)
    early = float(log.losses[:100].mean())
    late = float(log.losses[-100:].mean())
    assert late < early


def test_train_episode_rewards_use_previous_loss():
    cfg = LabConfig(steps=5, input_dim=6, feature_dim=3, batch_size=8, seed=4)
    sched = SchedulerConfig(update_period=100)
    log = train_episode(cfg, sched)
    # step 0 has no stability bonus, so its reward is a bare cosine
    assert -1.0 <= log.rewards[0] <= 1.0
    assert np.all(log.rewards[1:] >= -1.0)
    assert np.all(log.rewards <= 1.0 + sched.explore_weight * sched.reward_cap)


def test_train_episode_deterministic():
    cfg = LabConfig(steps=120, input_dim=8, feature_dim=4, batch_size=8, seed=11)
    sched = SchedulerConfig(update_period=50)
    a = train_episode(cfg, sched)
    b = train_episode(cfg, sched)
    np.testing.assert_array_equal(a.records, b.records)
    np.testing.assert_array_equal(a.final_weights, b.final_weights)
    np.testing.assert_array_equal(a.policy.w1, b.policy.w1)
    np.testing.assert_array_equal(a.policy.log_std, b.policy.log_std)
    # the policy updated at steps 50 and 100
    assert not np.array_equal(a.policy.vw2, init_policy(4, np.random.default_rng(11)).vw2)


def test_train_episode_seed_changes_run():
    cfg1 = LabConfig(steps=30, input_dim=6, feature_dim=3, batch_size=8, seed=0)
    cfg2 = LabConfig(steps=30, input_dim=6, feature_dim=3, batch_size=8, seed=1)
    a = train_episode(cfg1)
    b = train_episode(cfg2)
    assert not np.array_equal(a.records, b.records)


def test_train_episode_rejects_mismatched_policy():
    cfg = LabConfig(steps=5, feature_dim=4)
    wrong = init_policy(5, np.random.default_rng(0))
    with pytest.raises(ValidationError, match="state size"):
        train_episode(cfg, initial_policy=wrong)


def test_write_training_log_format(tmp_path):
    cfg = LabConfig(steps=8, input_dim=6, feature_dim=3, batch_size=8, seed=2)
    log = train_episode(cfg)
    path = tmp_path / "log.csv"
    write_training_log(log, path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(LOG_COLUMNS)
    assert len(lines) == 9
    first = lines[1].split(",")
    assert first[0] == "0"  # integral step column
    assert float(first[1]) == log.alphas[0]
    assert float(first[4]) == log.losses[0]
    # rewriting produces identical bytes
    again = tmp_path / "log2.csv"
    write_training_log(log, again)
    assert path.read_bytes() == again.read_bytes()


def test_train_episode_time_scales_linearly():
    """Cost per step is constant, so doubling the steps roughly doubles
    the wall time (generous bounds to tolerate scheduler jitter)."""
    base = dict(input_dim=8, feature_dim=4, batch_size=16, seed=0)
    train_episode(LabConfig(steps=60, **base))  # warmup

    def timed(steps):
        best = math.inf
        for _ in range(2):
            t0 = time.perf_counter()
            train_episode(LabConfig(steps=steps, **base))
            best = min(best, time.perf_counter() - t0)
        return best

    t300 = timed(300)
    t600 = timed(600)
    assert 1.5 <= t600 / t300 <= 2.6
