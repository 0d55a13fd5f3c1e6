"""Regrouping particle swarm optimization (gbest topology).

Classic inertia-weight PSO with velocity clamping, plus a stagnation
monitor: when the normalized swarm radius (largest particle distance from
the global best, scaled by the norm of the original box ranges) falls
below a threshold, the swarm is re-initialized inside a shrunken box
centered on the global best.  The regrouping box width per dimension is
the smaller of the original range and the regrouping factor times the
largest per-dimension deviation from the best, so a collapsed swarm is
re-inflated enough to escape the basin it stagnated in without leaving
the user's search domain.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class RegPsoConfig:
    bounds: Sequence[tuple]
    max_iterations: int
    swarm_size: int = 20
    inertia: float = 0.71633
    c1: float = 1.4962
    c2: float = 1.4962
    clamp_fraction: float = 0.15
    stagnation_threshold: float = 1.1e-4
    regroup_factor: float | None = None  # defaults to 6 / (5 * threshold)
    seed: int = 0

    def __post_init__(self):
        lower = np.array([b[0] for b in self.bounds], dtype=float)
        upper = np.array([b[1] for b in self.bounds], dtype=float)
        if lower.size == 0 or np.any(upper <= lower):
            raise ValueError(f"bounds must be non-degenerate, got {self.bounds}")
        if self.swarm_size < 2:
            raise ValueError("swarm must hold at least two particles")
        if not 0.0 < self.clamp_fraction <= 1.0:
            raise ValueError(
                f"clamp fraction must lie in (0, 1], got {self.clamp_fraction}"
            )
        if not self.stagnation_threshold > 0:
            raise ValueError("stagnation threshold must be positive")
        if self.regroup_factor is None:
            object.__setattr__(
                self, "regroup_factor", 6.0 / (5.0 * self.stagnation_threshold)
            )
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

    @property
    def range_norm(self) -> float:
        """Euclidean norm of the original per-dimension ranges."""
        return float(np.linalg.norm(self._upper - self._lower))


@dataclass
class SwarmState:
    positions: np.ndarray        # (n, dim)
    velocities: np.ndarray       # (n, dim)
    best_positions: np.ndarray   # personal bests (n, dim)
    best_values: np.ndarray      # (n,)
    global_best: np.ndarray      # (dim,)
    global_best_value: float
    box_low: np.ndarray          # current search box (regrouped)
    box_high: np.ndarray
    regroup_index: int
    iteration: int
    evaluations: int
    rng: np.random.Generator


@dataclass(frozen=True)
class RegPsoRun:
    best_point: np.ndarray
    best_fitness: float
    iterations_used: int
    regroup_count: int
    history: np.ndarray
    stopped_early: bool
    evaluations: int


def _evaluate_all(objective, X: np.ndarray) -> np.ndarray:
    try:
        return np.array([float(objective(x)) for x in X])
    except Exception as exc:
        raise RuntimeError("objective evaluation failed") from exc


def init_swarm(objective: Callable, config: RegPsoConfig) -> SwarmState:
    rng = np.random.default_rng(config.seed)
    n, dim = config.swarm_size, config.dim
    X = config.lower + rng.random((n, dim)) * (config.upper - config.lower)
    V = np.zeros((n, dim))
    values = _evaluate_all(objective, X)
    g = int(np.argmin(values))
    return SwarmState(
        positions=X, velocities=V,
        best_positions=X.copy(), best_values=values.copy(),
        global_best=X[g].copy(), global_best_value=float(values[g]),
        box_low=config.lower.copy(), box_high=config.upper.copy(),
        regroup_index=0, iteration=0, evaluations=n, rng=rng,
    )


def pso_step(state: SwarmState, config: RegPsoConfig,
             objective: Callable) -> SwarmState:
    """One velocity/position update with clamping and best bookkeeping."""
    n, dim = state.positions.shape
    rng = state.rng
    phi1 = rng.random((n, dim))
    phi2 = rng.random((n, dim))
    v = (config.inertia * state.velocities
         + config.c1 * phi1 * (state.best_positions - state.positions)
         + config.c2 * phi2 * (state.global_best - state.positions))
    vmax = config.clamp_fraction * (state.box_high - state.box_low)
    v = np.clip(v, -vmax, vmax)
    x = state.positions + v
    # keep particles inside the original domain; kill the velocity
    # component that pushed them out
    low_hit = x < config.lower
    high_hit = x > config.upper
    x = np.clip(x, config.lower, config.upper)
    v[low_hit | high_hit] = 0.0

    values = _evaluate_all(objective, x)
    improved = values < state.best_values
    state.best_positions[improved] = x[improved]
    state.best_values[improved] = values[improved]
    g = int(np.argmin(state.best_values))
    if state.best_values[g] < state.global_best_value:
        state.global_best = state.best_positions[g].copy()
        state.global_best_value = float(state.best_values[g])

    state.positions = x
    state.velocities = v
    state.iteration += 1
    state.evaluations += n
    return state


def swarm_radius(state: SwarmState, config: RegPsoConfig):
    """(delta, delta_norm): largest distance from the global best, and the
    same scaled by the original box's range norm."""
    delta = float(np.max(np.linalg.norm(
        state.positions - state.global_best, axis=1
    )))
    return delta, delta / config.range_norm


def regroup(state: SwarmState, config: RegPsoConfig) -> SwarmState:
    """Re-initialize the swarm in a shrunken box around the global best."""
    rng = state.rng
    g = state.global_best
    range0 = config.upper - config.lower
    dev = np.max(np.abs(state.positions - g), axis=0)
    new_range = np.minimum(range0, config.regroup_factor * dev)
    new_range = np.maximum(new_range, 1e-12 * range0)
    low = np.maximum(config.lower, g - 0.5 * new_range)
    high = np.minimum(config.upper, g + 0.5 * new_range)
    n, dim = state.positions.shape
    state.positions = low + rng.random((n, dim)) * (high - low)
    vmax = config.clamp_fraction * (high - low)
    state.velocities = np.clip(state.velocities, -vmax, vmax)
    state.box_low = low
    state.box_high = high
    state.regroup_index += 1
    return state


def regpso_minimize(objective: Callable, config: RegPsoConfig) -> RegPsoRun:
    """Iterate steps with stagnation-triggered regrouping; budgeted run."""
    state = init_swarm(objective, config)
    history = [state.global_best_value]
    for _ in range(config.max_iterations):
        state = pso_step(state, config, objective)
        history.append(state.global_best_value)
        _, delta_norm = swarm_radius(state, config)
        if delta_norm < config.stagnation_threshold:
            state = regroup(state, config)
    return RegPsoRun(
        best_point=state.global_best.copy(),
        best_fitness=state.global_best_value,
        iterations_used=state.iteration,
        regroup_count=state.regroup_index,
        history=np.array(history),
        stopped_early=False,
        evaluations=state.evaluations,
    )
