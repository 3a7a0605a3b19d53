"""Rule discovery: a (1+lambda) evolution strategy that seeds an interval on
a high-residual training example and grows it until fitness stalls."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .fitness import FitnessParams, rule_fitness
from .model import Dataset, IntervalCondition, Rule, fit_rule

# Signature of an injectable rule scorer: (fitted rule, iteration index) -> [0, 1].
# Iteration 0 is the seed individual.
FitnessFn = Callable[[Rule, int], float]


class RuleDiscoveryError(RuntimeError):
    """Raised when rule discovery cannot produce any usable rule."""


@dataclass(frozen=True)
class DiscoveryParams:
    """Evolution-strategy settings for discovering a single rule.

    ``lambda_`` children are generated per iteration; the search stops when
    the elitist from ``delta`` iterations ago still beats every later elitist,
    or after ``max_iter`` iterations. Mutation scales are relative to each
    feature's observed range.

    The default rule-fitness alpha leans toward accuracy (0.2): it keeps
    grown rules from overhanging regions their submodel fits poorly, which
    the mixed prediction cannot repair afterwards.
    """

    lambda_: int = 16
    delta: int = 5
    mutation_sigma: float = 0.05
    sigma_init: float = 0.1
    rules_per_phase: int = 4
    ridge_lambda: float = 0.01
    max_iter: int = 500
    max_reseed: int = 10
    fitness: FitnessParams = field(default_factory=lambda: FitnessParams(alpha=0.2))

    def __post_init__(self):
        if self.lambda_ < 1:
            raise ValueError("lambda_ must be at least 1")
        if self.delta < 1:
            raise ValueError("delta must be at least 1")
        if self.mutation_sigma <= 0:
            raise ValueError("mutation_sigma must be positive")
        if self.sigma_init <= 0:
            raise ValueError("sigma_init must be positive")
        if self.rules_per_phase < 1:
            raise ValueError("rules_per_phase must be at least 1")
        if self.ridge_lambda < 0:
            raise ValueError("ridge_lambda must be non-negative")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.max_reseed < 0:
            raise ValueError("max_reseed must be non-negative")


def select_seed_example(data: Dataset, residuals: np.ndarray, rng: np.random.Generator) -> int:
    """Roulette-wheel pick of a training example, weighted by squared residual.

    Falls back to a uniform pick when every residual is zero.
    """
    residuals = np.asarray(residuals, dtype=float)
    if residuals.shape != (data.n_samples,):
        raise ValueError(f"residuals must have shape ({data.n_samples},), got {residuals.shape}")
    weights = residuals**2
    total = weights.sum()
    if total <= 0.0:
        return int(rng.integers(0, data.n_samples))
    return int(rng.choice(data.n_samples, p=weights / total))


def initial_condition(
    x: np.ndarray, data: Dataset, sigma_init: float, rng: np.random.Generator
) -> IntervalCondition:
    """Box around example ``x``: each bound moves away from ``x`` by an
    independent halfnormal draw scaled to the feature range, then clips to
    the observed bounds. The result always matches ``x``."""
    x = np.asarray(x, dtype=float)
    bounds = data.feature_bounds
    scale = sigma_init * (bounds[:, 1] - bounds[:, 0])
    extents = np.abs(rng.normal(0.0, scale, size=(2, data.n_features)))
    lower = np.maximum(x - extents[0], bounds[:, 0])
    upper = np.minimum(x + extents[1], bounds[:, 1])
    return IntervalCondition(lower, upper)


def _grown_bounds(
    lower: np.ndarray,
    upper: np.ndarray,
    data: Dataset,
    sigma: float,
    rng: np.random.Generator,
    count: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Bounds of ``count`` growth-only mutations: each bound moves outward by
    an independent halfnormal draw scaled to the feature range, clipped to
    the observed bounds."""
    bounds = data.feature_bounds
    scale = sigma * (bounds[:, 1] - bounds[:, 0])
    extents = np.abs(rng.normal(0.0, scale, size=(count, 2, lower.shape[0])))
    lowers = np.maximum(lower - extents[:, 0, :], bounds[:, 0])
    uppers = np.minimum(upper + extents[:, 1, :], bounds[:, 1])
    return lowers, uppers


def mutate_condition(
    parent: IntervalCondition, data: Dataset, sigma: float, rng: np.random.Generator
) -> IntervalCondition:
    """Growth-only mutation: both bounds move outward by independent
    halfnormal draws scaled to the feature range, clipped to the observed
    bounds. The child's volume share never falls below the parent's."""
    lowers, uppers = _grown_bounds(parent.lower, parent.upper, data, sigma, rng, 1)
    return IntervalCondition(lowers[0], uppers[0])


def discover_rule(
    data: Dataset,
    residuals: np.ndarray,
    params: DiscoveryParams,
    rng: np.random.Generator,
    fitness_fn: Optional[FitnessFn] = None,
) -> Rule:
    """Evolve one rule and return the elitist the stall window settles on.

    Each iteration fits ``lambda_`` mutated children, records the best as that
    iteration's elitist, and replaces the parent only when strictly improved
    (plus-selection). The search stops once the elitist from ``delta``
    iterations ago is strictly fitter than every elitist since, returning that
    elitist; after ``max_iter`` iterations the best elitist seen wins.

    ``fitness_fn`` overrides the standard rule fitness; it must map into
    [0, 1] and exists so termination behavior can be exercised directly.
    """
    # The standard score depends only on the rule, so scored rules can be
    # cached outright; an injected scorer may depend on the iteration and is
    # re-applied on every cache hit.
    iteration_free = fitness_fn is None
    if fitness_fn is None:
        bounds = data.feature_bounds

        def fitness_fn(rule: Rule, iteration: int) -> float:
            return rule_fitness(rule, bounds, params.fitness)

    # Identical conditions produce identical fits; caching them keeps the
    # stall window cheap once mutation saturates at the feature bounds.
    fitted: dict[tuple[bytes, bytes], Rule] = {}

    def fit_scored(condition: IntervalCondition, iteration: int) -> Rule:
        key = (condition.lower.tobytes(), condition.upper.tobytes())
        cached = fitted.get(key)
        if cached is not None and iteration_free:
            return cached
        if cached is None:
            cached = fit_rule(condition, data, params.ridge_lambda)
        scored = replace(cached, fitness=float(fitness_fn(cached, iteration)))
        fitted[key] = scored if iteration_free else cached
        return scored

    def seed() -> Rule:
        index = select_seed_example(data, residuals, rng)
        condition = initial_condition(data.features[index], data, params.sigma_init, rng)
        return fit_scored(condition, 0)

    parent = seed()
    reseeds = 0
    while parent.is_degenerate and reseeds < params.max_reseed:
        reseeds += 1
        parent = seed()

    elitists = [parent]
    for iteration in range(1, params.max_iter + 1):
        lowers, uppers = _grown_bounds(
            parent.condition.lower,
            parent.condition.upper,
            data,
            params.mutation_sigma,
            rng,
            params.lambda_,
        )
        # Children clipped back onto the parent (a saturated parent breeds
        # only copies) reuse its condition object.
        unchanged = np.all(lowers == parent.condition.lower, axis=1) & np.all(
            uppers == parent.condition.upper, axis=1
        )
        best_child: Rule | None = None
        for k in range(params.lambda_):
            condition = (
                parent.condition if unchanged[k] else IntervalCondition(lowers[k], uppers[k])
            )
            child = fit_scored(condition, iteration)
            if best_child is None or child.fitness > best_child.fitness:
                best_child = child
        elitists.append(best_child)
        if best_child.fitness > parent.fitness:
            parent = best_child
        if iteration >= params.delta:
            stalled = elitists[iteration - params.delta]
            window = elitists[iteration - params.delta + 1 :]
            if all(stalled.fitness > later.fitness for later in window):
                return stalled
    return max(elitists, key=lambda rule: rule.fitness)


def discover_rules(
    data: Dataset,
    residuals: np.ndarray,
    params: DiscoveryParams,
    rng: np.random.Generator,
) -> list[Rule]:
    """Run ``rules_per_phase`` independent discoveries on their own rng
    streams and return the non-degenerate results."""
    streams = rng.spawn(params.rules_per_phase)
    rules = [discover_rule(data, residuals, params, stream) for stream in streams]
    return [rule for rule in rules if not rule.is_degenerate]
