"""Real-coded genetic algorithm with elitism.

Used in two places: as the inner feasibility search of the stability
certifier (where the fitness is an LMI query) and as the baseline outer
optimizer in the two-arm comparison.  Chromosomes are real vectors in a
bounded box; selection is rank-proportional roulette, crossover is an
arithmetic blend, mutation adds clipped Gaussian noise.  Elite individuals
carry their cached fitness into the next generation unchanged, which makes
the best-so-far history non-increasing by construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class GaConfig:
    bounds: Sequence[tuple]
    max_generations: int
    population_size: int = 20
    elite_count: int = 2
    crossover_ratio: float = 0.8
    mutation_ratio: float = 0.2
    mutation_scale: float = 0.1  # sigma as a fraction of each range
    seed: int = 0

    def __post_init__(self):
        lower = np.array([b[0] for b in self.bounds], dtype=float)
        upper = np.array([b[1] for b in self.bounds], dtype=float)
        if lower.size == 0 or np.any(upper <= lower):
            raise ValueError(f"bounds must be non-degenerate, got {self.bounds}")
        if not 0 <= self.elite_count < self.population_size:
            raise ValueError(
                f"elite count {self.elite_count} must be below the "
                f"population size {self.population_size}"
            )
        for name in ("crossover_ratio", "mutation_ratio"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.max_generations < 0:
            raise ValueError("max_generations must be non-negative")
        object.__setattr__(self, "_lower", lower)
        object.__setattr__(self, "_upper", upper)

    @property
    def lower(self) -> np.ndarray:
        return self._lower

    @property
    def upper(self) -> np.ndarray:
        return self._upper

    @property
    def dim(self) -> int:
        return self._lower.size


@dataclass
class GaState:
    population: np.ndarray  # sorted by fitness, best first
    fitness: np.ndarray
    generation: int
    evaluations: int
    rng: np.random.Generator


@dataclass(frozen=True)
class GaRun:
    best_point: np.ndarray
    best_fitness: float
    generations_used: int
    history: np.ndarray  # best fitness after each evaluated generation
    stopped_early: bool
    evaluations: int


def _evaluate(fitness: Callable, x: np.ndarray) -> float:
    try:
        return float(fitness(x))
    except Exception as exc:
        raise RuntimeError(f"fitness evaluation failed at {x}") from exc


def _sorted_by_fitness(pop: np.ndarray, fit: np.ndarray):
    order = np.argsort(fit)
    return pop[order], fit[order]


def _rank_pick(rng: np.random.Generator, n: int) -> int:
    """Index into a fitness-sorted population, rank-proportional weights."""
    w = np.arange(n, 0, -1, dtype=float)
    c = np.cumsum(w / w.sum())
    return int(np.searchsorted(c, rng.random()))


def ga_step(state: GaState, config: GaConfig,
            fitness: Callable[[np.ndarray], float]) -> GaState:
    """Advance one generation: elitism, selection, crossover, mutation."""
    pop, fit = state.population, state.fitness
    n = config.population_size
    rng = state.rng
    children = [pop[i].copy() for i in range(config.elite_count)]
    child_fit = [fit[i] for i in range(config.elite_count)]
    evals = state.evaluations
    while len(children) < n:
        i = _rank_pick(rng, n)
        child = pop[i].copy()
        if rng.random() < config.crossover_ratio:
            j = _rank_pick(rng, n)
            lam = rng.uniform(-0.25, 1.25)
            child = lam * child + (1.0 - lam) * pop[j]
        if rng.random() < config.mutation_ratio:
            child = child + rng.standard_normal(config.dim) \
                * config.mutation_scale * (config.upper - config.lower)
        child = np.clip(child, config.lower, config.upper)
        children.append(child)
        child_fit.append(_evaluate(fitness, child))
        evals += 1
    new_pop, new_fit = _sorted_by_fitness(
        np.array(children), np.array(child_fit)
    )
    return GaState(population=new_pop, fitness=new_fit,
                   generation=state.generation + 1, evaluations=evals,
                   rng=rng)


def ga_minimize(fitness: Callable[[np.ndarray], float], config: GaConfig,
                early_stop: Optional[Callable[[float], bool]] = None,
                initial_points: Optional[Sequence] = None) -> GaRun:
    """Run the GA until early_stop(best) holds or the generation cap hits.

    ``initial_points`` seeds the first rows of the starting population
    (clipped to the bounds); the remainder is sampled uniformly.  Runs are
    reproducible: identical seeds and a deterministic fitness give
    identical results.
    """
    rng = np.random.default_rng(config.seed)
    n, dim = config.population_size, config.dim
    pop = config.lower + rng.random((n, dim)) * (config.upper - config.lower)
    if initial_points is not None:
        for i, p in enumerate(initial_points):
            if i >= n:
                break
            pop[i] = np.clip(np.asarray(p, dtype=float), config.lower,
                             config.upper)
    fit = np.array([_evaluate(fitness, x) for x in pop])
    pop, fit = _sorted_by_fitness(pop, fit)
    state = GaState(population=pop, fitness=fit, generation=0,
                    evaluations=n, rng=rng)
    history = [float(state.fitness[0])]
    stopped = early_stop is not None and early_stop(history[-1])
    while not stopped and state.generation < config.max_generations:
        state = ga_step(state, config, fitness)
        history.append(min(history[-1], float(state.fitness[0])))
        stopped = early_stop is not None and early_stop(float(state.fitness[0]))
    return GaRun(
        best_point=state.population[0].copy(),
        best_fitness=float(state.fitness[0]),
        generations_used=state.generation,
        history=np.array(history),
        stopped_early=bool(stopped),
        evaluations=state.evaluations,
    )
