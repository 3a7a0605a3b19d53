"""Two-objective fitness: error squashing, interval volume share, and their
weighted combination for both rules and solution candidates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import IntervalCondition, Rule


@dataclass(frozen=True)
class FitnessParams:
    """``alpha`` weighs accuracy against the second objective, ``beta`` sets
    the slope of the error squashing."""

    alpha: float = 0.5
    beta: float = 2.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.beta <= 0:
            raise ValueError("beta must be positive")


def combine(o1: float, o2: float, alpha: float) -> float:
    """Combine two [0, 1] objectives into (1 + a^2) o1 o2 / (a^2 o1 + o2).

    Reduces to o1 for alpha -> 0 and to o2 for alpha -> inf; equals the
    objectives on the diagonal. Returns 0 when both objectives are 0.
    """
    if not 0.0 <= o1 <= 1.0:
        raise ValueError(f"o1 must lie in [0, 1], got {o1}")
    if not 0.0 <= o2 <= 1.0:
        raise ValueError(f"o2 must lie in [0, 1], got {o2}")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    a2 = alpha * alpha
    denominator = a2 * o1 + o2
    if denominator == 0.0:
        return 0.0
    return (1.0 + a2) * o1 * o2 / denominator


def pseudo_accuracy(mse: float, beta: float) -> float:
    """Squash a mean squared error into (0, 1] via exp(-mse * beta)."""
    if mse < 0:
        raise ValueError("mse must be non-negative")
    if beta <= 0:
        raise ValueError("beta must be positive")
    return math.exp(-mse * beta)


def volume_share(condition: IntervalCondition, feature_bounds: np.ndarray) -> float:
    """Fraction of the observed feature box covered by ``condition``.

    Product over dimensions of (upper - lower) / (max - min); a zero-width
    feature dimension carries no generality information and contributes
    factor 1. Assumes the condition is already clipped to the bounds.
    """
    feature_bounds = np.asarray(feature_bounds, dtype=float)
    spans = condition.upper - condition.lower
    ranges = feature_bounds[:, 1] - feature_bounds[:, 0]
    positive = ranges > 0
    factors = np.where(positive, spans / np.where(positive, ranges, 1.0), 1.0)
    return float(np.prod(factors))


def rule_fitness(rule: Rule, feature_bounds: np.ndarray, params: FitnessParams) -> float:
    """Combined fitness of a rule from its in-sample error and volume share.

    Degenerate rules score 0.
    """
    if rule.is_degenerate:
        return 0.0
    accuracy = pseudo_accuracy(rule.in_sample_error, params.beta)
    volume = volume_share(rule.condition, feature_bounds)
    return combine(accuracy, volume, params.alpha)


def candidate_fitness(mse: float, complexity: int, pool_size: int, params: FitnessParams) -> float:
    """Combined fitness of a solution candidate from its in-sample MSE and
    the number of selected rules, normalized against the current pool size."""
    if pool_size < 1:
        raise ValueError("pool_size must be positive")
    if complexity < 0:
        raise ValueError("complexity must be non-negative")
    if complexity > pool_size:
        raise ValueError(f"complexity {complexity} exceeds pool size {pool_size}")
    o1 = pseudo_accuracy(mse, params.beta)
    o2 = 1.0 - complexity / pool_size
    return combine(o1, o2, params.alpha)
