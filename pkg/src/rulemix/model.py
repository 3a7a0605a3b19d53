"""Core domain types: datasets, interval-matched linear rules, rule pools,
solution candidates, and weighted mixing of rule predictions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

# Added to a rule's in-sample error before inverting it as a mixing weight,
# so perfectly fitted rules do not divide by zero.
MIXING_EPSILON = 1e-6


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable training data with per-feature observed bounds.

    ``feature_bounds[i] = (min, max)`` over the training features. Rule
    conditions are clipped against these bounds and volume shares are
    normalized by them.
    """

    features: np.ndarray
    targets: np.ndarray
    feature_bounds: np.ndarray = field(init=False)

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        targets = np.asarray(self.targets, dtype=float)
        if features.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {features.shape}")
        n, d = features.shape
        if n < 1 or d < 1:
            raise ValueError(f"need at least one row and one feature, got shape {features.shape}")
        if targets.shape != (n,):
            raise ValueError(f"targets must have shape ({n},), got {targets.shape}")
        if not np.all(np.isfinite(features)):
            raise ValueError("features contain non-finite values")
        if not np.all(np.isfinite(targets)):
            raise ValueError("targets contain non-finite values")
        bounds = np.column_stack([features.min(axis=0), features.max(axis=0)])
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "feature_bounds", bounds)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True, eq=False)
class IntervalCondition:
    """Axis-aligned box. An input matches iff it lies inside on every axis,
    both bounds inclusive."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError(
                f"bounds must be 1-D vectors of equal length, got {lower.shape} and {upper.shape}"
            )
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("interval bounds must be finite")
        if np.any(lower > upper):
            raise ValueError("lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def n_features(self) -> int:
        return self.lower.shape[0]

    def matches(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != self.lower.shape:
            raise ValueError(f"expected input of shape {self.lower.shape}, got {x.shape}")
        return bool(np.all((self.lower <= x) & (x <= self.upper)))

    def match_mask(self, X: np.ndarray) -> np.ndarray:
        """Boolean mask over the rows of ``X`` that this condition matches."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(f"expected matrix with {self.n_features} columns, got shape {X.shape}")
        return np.all((self.lower <= X) & (X <= self.upper), axis=1)


@dataclass(frozen=True, eq=False)
class LinearSubmodel:
    """Local linear predictor ``intercept + coefficients . x``."""

    coefficients: np.ndarray
    intercept: float

    def __post_init__(self):
        coefficients = np.asarray(self.coefficients, dtype=float)
        if coefficients.ndim != 1:
            raise ValueError(f"coefficients must be a vector, got shape {coefficients.shape}")
        if not np.all(np.isfinite(coefficients)) or not np.isfinite(self.intercept):
            raise ValueError("submodel parameters must be finite")
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "intercept", float(self.intercept))

    def predict(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != self.coefficients.shape:
            raise ValueError(f"expected input of shape {self.coefficients.shape}, got {x.shape}")
        return float(self.intercept + self.coefficients @ x)

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return X @ self.coefficients + self.intercept


@dataclass(frozen=True, eq=False)
class Rule:
    """A fitted rule: interval condition, local linear submodel, and the
    statistics recorded at fit time.

    ``experience`` is the number of training examples the condition matched
    when the submodel was fitted and ``in_sample_error`` the submodel's MSE on
    exactly those examples. A rule with experience 0 is degenerate: it carries
    infinite error, any fitness assigns it 0, and pools refuse it.
    """

    condition: IntervalCondition
    submodel: LinearSubmodel
    experience: int
    in_sample_error: float
    fitness: float = 0.0

    def __post_init__(self):
        if self.experience < 0:
            raise ValueError("experience must be non-negative")
        if self.in_sample_error < 0:
            raise ValueError("in_sample_error must be non-negative")
        if not 0.0 <= self.fitness <= 1.0:
            raise ValueError("fitness must lie in [0, 1]")
        object.__setattr__(self, "experience", int(self.experience))
        object.__setattr__(self, "in_sample_error", float(self.in_sample_error))
        object.__setattr__(self, "fitness", float(self.fitness))

    @property
    def is_degenerate(self) -> bool:
        return self.experience == 0

    def predict(self, x: np.ndarray) -> float:
        """Submodel prediction at ``x``, whether or not ``x`` is matched."""
        return self.submodel.predict(x)


def fit_rule(condition: IntervalCondition, data: Dataset, ridge_lambda: float) -> Rule:
    """Fit a ridge submodel on the subsample matched by ``condition``.

    The intercept is left unpenalized by fitting on centered data. An empty
    matched subsample yields a degenerate rule (experience 0, infinite error)
    instead of raising; callers are expected to discard it. Fitness is left at
    0 for the fitness layer to fill in.
    """
    if ridge_lambda < 0:
        raise ValueError("ridge_lambda must be non-negative")
    mask = condition.match_mask(data.features)
    matched = int(mask.sum())
    d = data.n_features
    if matched == 0:
        return Rule(condition, LinearSubmodel(np.zeros(d), 0.0), 0, np.inf)

    X = data.features[mask]
    y = data.targets[mask]
    x_mean = X.mean(axis=0)
    y_mean = float(y.mean())
    Xc = X - x_mean
    yc = y - y_mean
    if ridge_lambda > 0:
        gram = Xc.T @ Xc + ridge_lambda * np.eye(d)
        coefficients = np.linalg.solve(gram, Xc.T @ yc)
    else:
        # Plain least squares; lstsq handles rank-deficient subsamples.
        coefficients, *_ = np.linalg.lstsq(Xc, yc, rcond=None)
    intercept = y_mean - float(coefficients @ x_mean)
    residual = y - (X @ coefficients + intercept)
    mse = float(np.mean(residual**2))
    return Rule(condition, LinearSubmodel(coefficients, intercept), matched, mse)


class Pool:
    """Append-only archive of discovered rules.

    Insertion order is stable and rules are never removed or modified, so the
    index of a rule stays valid for every genome that references it.
    """

    def __init__(self, rules: Sequence[Rule] = ()):
        self._rules: list[Rule] = []
        self.extend(rules)

    def append(self, rule: Rule) -> None:
        if rule.is_degenerate:
            raise ValueError("degenerate rules cannot enter the pool")
        self._rules.append(rule)

    def extend(self, rules: Sequence[Rule]) -> None:
        for rule in rules:
            self.append(rule)

    @property
    def rules(self) -> tuple[Rule, ...]:
        return tuple(self._rules)

    def __len__(self) -> int:
        return len(self._rules)

    def __getitem__(self, index: int) -> Rule:
        return self._rules[index]

    def __iter__(self) -> Iterator[Rule]:
        return iter(self._rules)


@dataclass(frozen=True, eq=False)
class SolutionCandidate:
    """Bit string selecting a subset of the pool, with cached evaluation."""

    genome: np.ndarray
    cached_mse: float
    cached_complexity: int
    cached_fitness: float

    def __post_init__(self):
        genome = np.array(self.genome, dtype=bool)
        if genome.ndim != 1:
            raise ValueError(f"genome must be a 1-D bit string, got shape {genome.shape}")
        if self.cached_complexity != int(genome.sum()):
            raise ValueError("cached_complexity must equal the genome popcount")
        object.__setattr__(self, "genome", genome)
        object.__setattr__(self, "cached_mse", float(self.cached_mse))
        object.__setattr__(self, "cached_complexity", int(self.cached_complexity))
        object.__setattr__(self, "cached_fitness", float(self.cached_fitness))

    @property
    def complexity(self) -> int:
        return self.cached_complexity


def mixing_weight(rule: Rule) -> float:
    """Mixing weight: experience over (in-sample error + epsilon)."""
    return rule.experience / (rule.in_sample_error + MIXING_EPSILON)


def predict_mixed(candidate: SolutionCandidate, pool: Pool, x: np.ndarray, default: float) -> float:
    """Weighted average of the selected matching rules' predictions at ``x``.

    Returns ``default`` when no selected rule matches (or the matching rules
    carry zero total weight).
    """
    if candidate.genome.shape[0] != len(pool):
        raise ValueError(f"genome length {candidate.genome.shape[0]} does not match pool size {len(pool)}")
    x = np.asarray(x, dtype=float)
    numerator = 0.0
    denominator = 0.0
    for index in np.flatnonzero(candidate.genome):
        rule = pool[index]
        if rule.condition.matches(x):
            w = mixing_weight(rule)
            numerator += w * rule.predict(x)
            denominator += w
    if denominator <= 0.0:
        return float(default)
    return numerator / denominator


class RulePredictionTable:
    """Per-rule match masks, predictions, and mixing weights over a fixed
    input matrix; lets genome evaluations run as small matrix reductions."""

    def __init__(self, masks: np.ndarray, predictions: np.ndarray, weights: np.ndarray):
        self.masks = masks
        self.predictions = predictions
        self.weights = weights

    @classmethod
    def build(cls, rules: Sequence[Rule], X: np.ndarray) -> "RulePredictionTable":
        X = np.asarray(X, dtype=float)
        n = X.shape[0]
        masks = np.zeros((len(rules), n), dtype=bool)
        predictions = np.zeros((len(rules), n), dtype=float)
        weights = np.zeros(len(rules), dtype=float)
        for k, rule in enumerate(rules):
            masks[k] = rule.condition.match_mask(X)
            predictions[k] = rule.submodel.predict_batch(X)
            weights[k] = mixing_weight(rule)
        return cls(masks, predictions, weights)

    def mixed(self, selected: np.ndarray, default: float) -> np.ndarray:
        selected = np.asarray(selected, dtype=bool)
        if selected.shape[0] != self.masks.shape[0]:
            raise ValueError("selection length does not match the table")
        weighted_masks = self.weights[selected, None] * self.masks[selected]
        denominator = weighted_masks.sum(axis=0)
        numerator = (weighted_masks * self.predictions[selected]).sum(axis=0)
        out = np.full(self.masks.shape[1], float(default))
        np.divide(numerator, denominator, out=out, where=denominator > 0.0)
        return out


def mixed_predictions(rules: Sequence[Rule], X: np.ndarray, default: float) -> np.ndarray:
    """Row-wise mixed prediction of ``rules`` over ``X``."""
    table = RulePredictionTable.build(rules, X)
    return table.mixed(np.ones(len(rules), dtype=bool), default)


def solution_residuals(candidate: SolutionCandidate, pool: Pool, data: Dataset) -> np.ndarray:
    """Per-example residuals of the candidate's mixed prediction.

    Inputs matched by no selected rule fall back to the training-target mean,
    so an empty candidate leaves residuals centered on that mean.
    """
    if candidate.genome.shape[0] != len(pool):
        raise ValueError(f"genome length {candidate.genome.shape[0]} does not match pool size {len(pool)}")
    default = float(data.targets.mean())
    selected = [pool[i] for i in np.flatnonzero(candidate.genome)]
    return data.targets - mixed_predictions(selected, data.features, default)
