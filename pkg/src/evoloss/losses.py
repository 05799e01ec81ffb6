"""Two-view representation losses with analytic gradients.

Every loss takes two feature batches of shape (batch, dim) — one row
per sample, matching rows are views of the same input — and returns
``(loss, (grad_z1, grad_z2))`` so callers can chain into an encoder
without autodiff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFeatureError, NormalizationError, ValidationError

#: Softmax temperature applied to pairwise cosine similarities.
DEFAULT_TEMPERATURE = 0.07
#: Weight of the off-diagonal (redundancy) terms in the decorrelation loss.
DEFAULT_OFFDIAG_WEIGHT = 0.0051
#: Keeps log(1 - cos^2) finite when a similarity saturates.
_LOG_EPS = 1e-8


@dataclass(frozen=True)
class LossWeights:
    """Nonnegative mixing weights for the combined objective."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValidationError("loss weights must be finite")
        if self.alpha < 0.0 or self.beta < 0.0:
            raise ValidationError(
                f"loss weights must be nonnegative, got ({self.alpha}, {self.beta})"
            )
        if self.alpha == 0.0 and self.beta == 0.0:
            raise ValidationError("loss weights must not both be zero")


def _check_pair(z1, z2) -> tuple[np.ndarray, np.ndarray]:
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    if z1.ndim != 2 or z2.ndim != 2:
        raise ValidationError("feature batches must be 2-D (batch, dim)")
    if z1.shape != z2.shape:
        raise ValidationError(f"view shapes differ: {z1.shape} vs {z2.shape}")
    if z1.shape[0] < 2:
        raise ValidationError(f"need a batch of at least 2, got {z1.shape[0]}")
    if z1.shape[1] < 1:
        raise ValidationError("feature dimension must be at least 1")
    if not (np.all(np.isfinite(z1)) and np.all(np.isfinite(z2))):
        raise ValidationError("feature batches must be finite")
    return z1, z2


def _unit_rows(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise NormalizationError("a feature row has zero norm")
    return z / norms, norms


def _logsumexp_rows(s: np.ndarray) -> np.ndarray:
    m = s.max(axis=1, keepdims=True)
    return (m + np.log(np.sum(np.exp(s - m), axis=1, keepdims=True)))[:, 0]


def _softmax_rows(s: np.ndarray) -> np.ndarray:
    p = np.exp(s - s.max(axis=1, keepdims=True))
    return p / p.sum(axis=1, keepdims=True)


def info_nce(z1, z2, temperature: float = DEFAULT_TEMPERATURE):
    """Symmetric contrastive alignment loss.

    Matching rows across the two views are positives; every other
    cross-view row is a negative.  Each direction scores anchors with a
    temperature-scaled cosine softmax, and the two directions are
    averaged.  Returns (loss, (grad_z1, grad_z2)).
    """
    z1, z2 = _check_pair(z1, z2)
    if not (math.isfinite(temperature) and temperature > 0.0):
        raise ValidationError(f"temperature must be positive, got {temperature}")
    u, nu = _unit_rows(z1)
    v, nv = _unit_rows(z2)
    s = (u @ v.T) / temperature
    n = s.shape[0]
    idx = np.arange(n)
    diag = s[idx, idx]
    loss = 0.5 * (
        np.mean(_logsumexp_rows(s) - diag) + np.mean(_logsumexp_rows(s.T) - diag)
    )
    eye = np.eye(n)
    g_s = ((_softmax_rows(s) - eye) + (_softmax_rows(s.T) - eye).T) / (2.0 * n)
    g_u = (g_s @ v) / temperature
    g_v = (g_s.T @ u) / temperature
    # undo the row normalization: project out the radial component
    g1 = (g_u - u * np.sum(g_u * u, axis=1, keepdims=True)) / nu
    g2 = (g_v - v * np.sum(g_v * v, axis=1, keepdims=True)) / nv
    return float(loss), (g1, g2)


def _centered_unit_columns(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    centered = z - z.mean(axis=0)
    norms = np.linalg.norm(centered, axis=0)
    if np.any(norms == 0.0):
        raise DegenerateFeatureError("a feature column has zero variance")
    return centered / norms, norms


def cross_correlation(z1, z2) -> np.ndarray:
    """Batch cross-correlation matrix between feature dimensions.

    Columns are centered over the batch and unit-normalized, so every
    entry is a correlation coefficient in [-1, 1].
    """
    z1, z2 = _check_pair(z1, z2)
    a, _ = _centered_unit_columns(z1)
    b, _ = _centered_unit_columns(z2)
    return a.T @ b


def barlow_twins(z1, z2, epsilon: float = DEFAULT_OFFDIAG_WEIGHT):
    """Redundancy-reduction loss on the cross-correlation matrix.

    Pulls the diagonal toward 1 and the off-diagonal toward 0, the
    latter weighted by epsilon.  Returns (loss, (grad_z1, grad_z2)).
    """
    z1, z2 = _check_pair(z1, z2)
    if not (math.isfinite(epsilon) and epsilon >= 0.0):
        raise ValidationError(f"epsilon must be nonnegative, got {epsilon}")
    a, na = _centered_unit_columns(z1)
    b, nb = _centered_unit_columns(z2)
    corr = a.T @ b
    d = corr.shape[0]
    idx = np.arange(d)
    diag = corr[idx, idx]
    off = corr.copy()
    off[idx, idx] = 0.0
    loss = float(np.sum((1.0 - diag) ** 2) + epsilon * np.sum(off**2))
    g_c = 2.0 * epsilon * corr
    g_c[idx, idx] = -2.0 * (1.0 - diag)
    g_a = b @ g_c.T
    g_b = a @ g_c
    # undo the column normalization, then the centering
    g_za = (g_a - a * np.sum(g_a * a, axis=0)) / na
    g_zb = (g_b - b * np.sum(g_b * b, axis=0)) / nb
    g1 = g_za - g_za.mean(axis=0)
    g2 = g_zb - g_zb.mean(axis=0)
    return loss, (g1, g2)


def ensemble_loss(
    z1,
    z2,
    weights: LossWeights,
    temperature: float = DEFAULT_TEMPERATURE,
    epsilon: float = DEFAULT_OFFDIAG_WEIGHT,
):
    """Weighted sum of the contrastive and decorrelation losses.

    Returns (loss, (grad_z1, grad_z2)); the gradient is the same linear
    combination of the component gradients.
    """
    if not isinstance(weights, LossWeights):
        weights = LossWeights(*weights)
    loss_gen, (ga1, ga2) = info_nce(z1, z2, temperature)
    loss_dis, (gb1, gb2) = barlow_twins(z1, z2, epsilon)
    loss = weights.alpha * loss_gen + weights.beta * loss_dis
    g1 = weights.alpha * ga1 + weights.beta * gb1
    g2 = weights.alpha * ga2 + weights.beta * gb2
    return float(loss), (g1, g2)
