"""Two-player asymmetric game between a generalizability-oriented model
and a discriminability-oriented one, and its replicator dynamics.

Population state is a point (x, y) in the unit square: x is the share
of the first population playing "cooperate" (contribute its strength to
the ensemble), y the same for the second population.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DegenerateGameError, OutOfSimplexError, ValidationError
from .metrics import PayoffParams

#: Magnitudes below this are treated as exact zeros in fixed-point and
#: stability logic.
ZERO_TOL = 1e-9


class PopulationState(NamedTuple):
    x: float
    y: float


def check_state(state) -> PopulationState:
    """Validate that state is a finite point of the unit square."""
    x, y = state
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValidationError(f"state must be finite, got ({x}, {y})")
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValidationError(f"state ({x}, {y}) outside the unit square")
    return PopulationState(float(x), float(y))


def income_matrix_gen(p: PayoffParams) -> np.ndarray:
    """Income matrix of the generalizability player (row = own move)."""
    return np.array(
        [
            [p.w1 * (p.g1 - p.n2) + (p.d2 - p.n1), p.w1 * p.g1 + p.d1],
            [p.w1 * p.g2 + p.d2, 0.0],
        ]
    )


def income_matrix_dis(p: PayoffParams) -> np.ndarray:
    """Income matrix of the discriminability player (row = own move)."""
    return np.array(
        [
            [(p.g1 - p.n2) + p.w2 * (p.d2 - p.n1), p.g1 + p.w2 * p.d1],
            [p.g2 + p.w2 * p.d2, 0.0],
        ]
    )


def expected_utility_gen(p: PayoffParams, state) -> tuple[float, float]:
    """Expected income of the generalizability player.

    Returns (u_coop, u_mean): the income of its cooperating strategy
    against the opponent mix, and the population-average income.
    """
    x, y = check_state(state)
    h = income_matrix_gen(p)
    opponent = np.array([x, 1.0 - x])
    own = np.array([y, 1.0 - y])
    u_coop = float(h[0] @ opponent)
    u_mean = float(own @ h @ opponent)
    return u_coop, u_mean


def field_coefficients(p: PayoffParams) -> tuple[float, float, float, float]:
    """Constants (a, b, c, e) of the replicator field.

    dx/dt = x (1 - x) (a - b y)      dy/dt = y (1 - y) (c - e x)
    """
    a = p.g2 + p.w2 * p.d2
    b = p.w2 * p.d1 + p.g2 + p.n2 + p.w2 * p.n1
    c = p.w1 * p.g1 + p.d1
    e = p.d1 + p.w1 * p.g2 + p.w1 * p.n2 + p.n1
    return a, b, c, e


def replicator_rhs(p: PayoffParams, state) -> tuple[float, float]:
    """Time derivative (dx/dt, dy/dt) of the cooperation shares."""
    x, y = check_state(state)
    a, b, c, e = field_coefficients(p)
    return x * (1.0 - x) * (a - b * y), y * (1.0 - y) * (c - e * x)


def saddle_point(p: PayoffParams) -> PopulationState:
    """The interior fixed point (x*, y*) of the replicator field.

    Raises DegenerateGameError when a defining denominator vanishes and
    OutOfSimplexError when the point falls outside the unit square.
    """
    a, b, c, e = field_coefficients(p)
    if abs(e) <= ZERO_TOL or abs(b) <= ZERO_TOL:
        raise DegenerateGameError(
            "interior fixed point undefined: zero denominator in (x*, y*)"
        )
    x_star = c / e
    y_star = a / b
    if not (0.0 <= x_star <= 1.0 and 0.0 <= y_star <= 1.0):
        raise OutOfSimplexError(x_star, y_star)
    return PopulationState(x_star, y_star)


def is_ess(f_value: float, f_derivative: float) -> bool:
    """Evolutionarily stable: the growth rate vanishes and does not
    increase under perturbation."""
    return abs(f_value) <= ZERO_TOL and f_derivative <= ZERO_TOL
