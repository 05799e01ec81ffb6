"""Shared test utilities: parameter samplers and slow-but-simple oracles.

Everything in here is deliberately independent of the package internals —
oracles go through the public API only (``replicator_rhs``) or reimplement
the arithmetic from scratch, so they can catch bugs in the fast paths.
"""

from __future__ import annotations

import math

import numpy as np

from evoloss import PayoffParams, PopulationState, field_coefficients, replicator_rhs, saddle_point


def sample_saddle_params(rng: np.random.Generator, margin: float = 0.02) -> PayoffParams:
    """Draw random payoff parameters whose interior fixed point is comfortably
    inside the unit square (rejection sampling)."""
    while True:
        p = PayoffParams(
            g1=rng.uniform(0.5, 3.0),
            d1=rng.uniform(0.5, 3.0),
            g2=rng.uniform(0.5, 3.0),
            d2=rng.uniform(0.5, 3.0),
            n1=rng.uniform(0.0, 0.5),
            n2=rng.uniform(0.0, 0.5),
            w1=rng.uniform(0.5, 2.0),
            w2=rng.uniform(0.5, 2.0),
        )
        try:
            s = saddle_point(p)
        except Exception:
            continue
        if margin <= s.x <= 1.0 - margin and margin <= s.y <= 1.0 - margin:
            return p


def sample_gentle_pair(rng: np.random.Generator) -> tuple[PayoffParams, PopulationState]:
    """Weak-field regime: small payoffs keep the flow slow enough that a
    fine-step Euler reference is itself accurate to well below 1e-6."""
    p = PayoffParams(
        g1=rng.uniform(0.05, 0.25),
        d1=rng.uniform(0.05, 0.25),
        g2=rng.uniform(0.05, 0.25),
        d2=rng.uniform(0.05, 0.25),
        n1=rng.uniform(0.0, 0.08),
        n2=rng.uniform(0.0, 0.08),
        w1=rng.uniform(0.9, 1.1),
        w2=rng.uniform(0.9, 1.1),
    )
    start = PopulationState(rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9))
    return p, start


def euler_flow(p: PayoffParams, start: PopulationState, dt: float, t_max: float) -> PopulationState:
    """Plain forward-Euler integration through the public RHS.

    Slow and simple on purpose; used as an independent reference for the
    packaged integrators.
    """
    x, y = float(start.x), float(start.y)
    n = int(round(t_max / dt))
    for _ in range(n):
        dx, dy = replicator_rhs(p, PopulationState(x, y))
        x = min(max(x + dt * dx, 0.0), 1.0)
        y = min(max(y + dt * dy, 0.0), 1.0)
    return PopulationState(x, y)


def fd_jacobian(p: PayoffParams, state: PopulationState, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of the replicator field."""
    out = np.empty((2, 2))
    for j, (ex, ey) in enumerate(((1.0, 0.0), (0.0, 1.0))):
        plus = replicator_rhs(p, PopulationState(state.x + h * ex, state.y + h * ey))
        minus = replicator_rhs(p, PopulationState(state.x - h * ex, state.y - h * ey))
        out[0, j] = (plus[0] - minus[0]) / (2.0 * h)
        out[1, j] = (plus[1] - minus[1]) / (2.0 * h)
    return out


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))


def rhs_norm(p: PayoffParams, state: PopulationState) -> float:
    dx, dy = replicator_rhs(p, state)
    return math.hypot(dx, dy)


def assert_coefficients_positive(p: PayoffParams) -> None:
    a, b, c, e = field_coefficients(p)
    assert min(a, b, c, e) > 0.0
