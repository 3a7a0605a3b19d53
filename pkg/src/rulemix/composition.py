"""Solution composition: a genetic algorithm over bit strings that selects a
small, accurate subset of the rule pool."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .fitness import FitnessParams, candidate_fitness
from .model import Dataset, Pool, RulePredictionTable, SolutionCandidate


@dataclass(frozen=True)
class CompositionParams:
    """Genetic-algorithm settings for one composition phase."""

    population_size: int = 32
    tournament_k: int = 5
    crossover_points: int = 2
    crossover_prob: float = 0.9
    mutation_rate: float = 0.05
    elitists: int = 4
    generations_per_phase: int = 32
    fitness: FitnessParams = field(default_factory=FitnessParams)

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population_size must be at least 1")
        if not 1 <= self.tournament_k <= self.population_size:
            raise ValueError("tournament_k must lie in [1, population_size]")
        if self.crossover_points < 1:
            raise ValueError("crossover_points must be at least 1")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError("crossover_prob must lie in [0, 1]")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in [0, 1]")
        if not 0 <= self.elitists < self.population_size:
            raise ValueError("elitists must lie in [0, population_size)")
        if self.generations_per_phase < 1:
            raise ValueError("generations_per_phase must be at least 1")


def evaluate_candidate(
    genome: np.ndarray,
    pool: Pool,
    data: Dataset,
    params: CompositionParams,
    table: Optional[RulePredictionTable] = None,
) -> SolutionCandidate:
    """Score a genome: in-sample MSE of the mixed prediction over the full
    training set, complexity, and the combined candidate fitness.

    ``table`` may carry precomputed per-rule predictions for this pool and
    dataset; one is built on the fly otherwise.
    """
    genome = np.asarray(genome, dtype=bool)
    if genome.shape != (len(pool),):
        raise ValueError(f"genome length {genome.shape} does not match pool size {len(pool)}")
    if table is None:
        table = RulePredictionTable.build(pool.rules, data.features)
    default = float(data.targets.mean())
    predictions = table.mixed(genome, default)
    mse = float(np.mean((data.targets - predictions) ** 2))
    complexity = int(genome.sum())
    fitness = candidate_fitness(mse, complexity, len(pool), params.fitness)
    return SolutionCandidate(genome, mse, complexity, fitness)


def tournament_select(
    population: Sequence[SolutionCandidate], k: int, rng: np.random.Generator
) -> SolutionCandidate:
    """Draw ``k`` members uniformly with replacement and return the fittest;
    ties break toward lower complexity, then the earlier population index."""
    if not population:
        raise ValueError("population must be non-empty")
    if k < 1:
        raise ValueError("k must be at least 1")
    draws = rng.integers(0, len(population), size=k)
    best_key = None
    best = None
    for index in draws:
        candidate = population[index]
        key = (-candidate.cached_fitness, candidate.cached_complexity, int(index))
        if best_key is None or key < best_key:
            best_key = key
            best = candidate
    return best


def crossover_npoint(
    a: np.ndarray,
    b: np.ndarray,
    n_points: int,
    crossover_prob: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """n-point crossover producing two complementary children.

    With probability ``1 - crossover_prob`` the parents are returned as
    copies. Otherwise ``n_points`` distinct cut positions are drawn uniformly
    and segments alternate between the parents, so at every position the
    children jointly hold exactly the two parent bits.
    """
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"parents must be equal-length bit strings, got {a.shape} and {b.shape}")
    length = a.shape[0]
    if not 1 <= n_points < length:
        raise ValueError(f"n_points must lie in [1, {length - 1}], got {n_points}")
    if rng.random() >= crossover_prob:
        return a.copy(), b.copy()
    cuts = np.sort(rng.choice(np.arange(1, length), size=n_points, replace=False))
    from_a = np.zeros(length, dtype=bool)
    take = True
    start = 0
    for cut in [*cuts.tolist(), length]:
        from_a[start:cut] = take
        take = not take
        start = cut
    return np.where(from_a, a, b), np.where(from_a, b, a)


def mutate_bits(genome: np.ndarray, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Flip each bit independently with probability ``rate``."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError("rate must lie in [0, 1]")
    genome = np.asarray(genome, dtype=bool)
    flips = rng.random(genome.shape[0]) < rate
    return genome ^ flips


def pad_genome(genome: np.ndarray, size: int) -> np.ndarray:
    """Zero-pad a genome up to ``size`` so it references a grown pool."""
    genome = np.asarray(genome, dtype=bool)
    if size < genome.shape[0]:
        raise ValueError("pools never shrink; cannot pad to a smaller size")
    padded = np.zeros(size, dtype=bool)
    padded[: genome.shape[0]] = genome
    return padded


def _better(a: SolutionCandidate, b: SolutionCandidate) -> SolutionCandidate:
    """Prefer ``b`` only on strictly higher fitness, or equal fitness with
    strictly lower complexity; first-seen wins otherwise."""
    if b.cached_fitness > a.cached_fitness:
        return b
    if b.cached_fitness == a.cached_fitness and b.cached_complexity < a.cached_complexity:
        return b
    return a


def compose(
    pool: Pool,
    data: Dataset,
    params: CompositionParams,
    rng: np.random.Generator,
    warm_population: Optional[Sequence[SolutionCandidate]] = None,
) -> tuple[SolutionCandidate, list[SolutionCandidate]]:
    """Evolve subset selections over the pool and return the best candidate
    ever evaluated plus the final population.

    A warm-start population is carried over by zero-padding each genome to
    the current pool size; a cold start draws unbiased random genomes. Each
    generation copies the top ``elitists`` unchanged and fills the rest by
    tournament selection, crossover, and bit-flip mutation. Rules themselves
    are never touched.
    """
    n = len(pool)
    if n == 0:
        raise ValueError("cannot compose from an empty pool")
    table = RulePredictionTable.build(pool.rules, data.features)
    size = params.population_size

    if warm_population is not None:
        genomes = [pad_genome(candidate.genome, n) for candidate in warm_population][:size]
    else:
        genomes = []
    while len(genomes) < size:
        genomes.append(rng.random(n) < 0.5)

    population = [evaluate_candidate(genome, pool, data, params, table) for genome in genomes]
    best = population[0]
    for candidate in population[1:]:
        best = _better(best, candidate)

    # A 1-bit genome admits no cut position; crossover degrades to copying.
    cut_points = min(params.crossover_points, n - 1)

    for _ in range(params.generations_per_phase):
        ranked = sorted(
            population, key=lambda c: (-c.cached_fitness, c.cached_complexity)
        )
        next_population = ranked[: params.elitists]
        while len(next_population) < size:
            parent1 = tournament_select(population, params.tournament_k, rng)
            parent2 = tournament_select(population, params.tournament_k, rng)
            if cut_points >= 1:
                children = crossover_npoint(
                    parent1.genome, parent2.genome, cut_points, params.crossover_prob, rng
                )
            else:
                children = (parent1.genome.copy(), parent2.genome.copy())
            remaining = size - len(next_population)
            for genome in children[:remaining]:
                mutated = mutate_bits(genome, params.mutation_rate, rng)
                child = evaluate_candidate(mutated, pool, data, params, table)
                next_population.append(child)
                best = _better(best, child)
        population = next_population
    return best, population
