"""Monte Carlo simulation of the lossy loop and the tracking cost.

Each realization draws an i.i.d. Bernoulli delivery sequence: a delivered
packet re-synchronizes the controller's held state with the plant state,
a dropped one freezes it.  The control law regulates around the shifted
state (r, 0, ..., 0), which gives zero steady-state offset on step
references for integrator-chain plants.  The cost is the discrete
time-weighted absolute tracking error sum(k * |r - y(k)|).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .plant import DiscretePlant


@dataclass(frozen=True)
class SimTrace:
    """One closed-loop realization, step index 0..n_steps.

    x[k] is the plant state, x_held[k] the controller's copy, u[k] the
    input applied at step k, y[k] = C x[k], dropped[k] marks the packets
    that never arrived (dropped[0] is always False: the loop starts
    synchronized).
    """

    x: np.ndarray        # (N+1, n)
    x_held: np.ndarray   # (N+1, n)
    u: np.ndarray        # (N+1, m); u[N] is computed but never applied
    y: np.ndarray        # (N+1, p)
    dropped: np.ndarray  # (N+1,) bool
    h: float
    ref_amplitude: float

    @property
    def n_steps(self) -> int:
        return self.x.shape[0] - 1


@dataclass(frozen=True)
class CostEstimate:
    mean: float
    std_dev: float
    per_realization: np.ndarray
    realizations: int


def simulate_once(d: DiscretePlant, K, p_tx: float, ref_amplitude: float,
                  n_steps: int, seed, x0=None) -> SimTrace:
    """Simulate one packet-loss realization of the closed loop.

    Starts from x0 (zero by default) with the first measurement delivered;
    at every later step the measurement drops with probability 1 - p_tx.
    p_tx may be 1 to force the lossless loop.
    """
    if not 0.0 < p_tx <= 1.0:
        raise ValueError(f"delivery probability must be in (0, 1], got {p_tx}")
    if n_steps < 1:
        raise ValueError(f"horizon must be at least 1 step, got {n_steps}")
    K = np.atleast_2d(np.asarray(K, dtype=float))
    n, m = d.n_states, d.n_inputs
    if K.shape != (m, n):
        raise ValueError(f"gain must be {m}x{n}, got {K.shape}")
    rng = np.random.default_rng(seed)
    x_ref = np.zeros(n)
    x_ref[0] = ref_amplitude

    x = np.zeros((n_steps + 1, n))
    if x0 is not None:
        x[0] = np.asarray(x0, dtype=float).ravel()
    x_held = np.zeros_like(x)
    x_held[0] = x[0]
    u = np.zeros((n_steps + 1, m))
    dropped = np.zeros(n_steps + 1, dtype=bool)

    G, H = d.G, d.H
    for k in range(n_steps):
        u[k] = -K @ (x_held[k] - x_ref)
        x[k + 1] = G @ x[k] + H @ u[k]
        dropped[k + 1] = rng.random() >= p_tx
        x_held[k + 1] = x_held[k] if dropped[k + 1] else x[k + 1]
    u[n_steps] = -K @ (x_held[n_steps] - x_ref)
    y = x @ d.C.T
    return SimTrace(x=x, x_held=x_held, u=u, y=y, dropped=dropped,
                    h=d.h, ref_amplitude=float(ref_amplitude))


def itae_cost(trace: SimTrace) -> float:
    """Time-weighted absolute tracking error: sum over k of k * |r - y(k)|.

    The weight is the dimensionless sample index, starting at k = 1.
    """
    if trace.y.shape[1] != 1:
        raise ValueError(
            "tracking cost needs a single output, got "
            f"{trace.y.shape[1]} outputs"
        )
    k = np.arange(1, trace.n_steps + 1, dtype=float)
    err = np.abs(trace.ref_amplitude - trace.y[1:, 0])
    return float(np.sum(k * err))


def realization_seeds(seed_base, count: int) -> list:
    """Deterministic per-realization seeds derived from a base seed."""
    return [(seed_base, i) for i in range(count)]


def itae_over_seeds(d: DiscretePlant, K, p_tx: float, ref_amplitude: float,
                    n_steps: int, seeds: Sequence) -> CostEstimate:
    """Tracking cost statistics over an explicit list of realization seeds."""
    costs = np.array([
        itae_cost(simulate_once(d, K, p_tx, ref_amplitude, n_steps, seed))
        for seed in seeds
    ])
    return CostEstimate(
        mean=float(np.mean(costs)),
        std_dev=float(np.std(costs)),
        per_realization=costs,
        realizations=len(costs),
    )


def expected_itae(d: DiscretePlant, K, p_tx: float, ref_amplitude: float,
                  n_steps: int, n_realizations: int, seed_base) -> CostEstimate:
    """Monte Carlo estimate of the expected tracking cost.

    Realization i uses the seed (seed_base, i), so estimates are
    reproducible and independent of evaluation order.
    """
    if n_realizations < 1:
        raise ValueError("need at least one realization")
    return itae_over_seeds(
        d, K, p_tx, ref_amplitude, n_steps,
        realization_seeds(seed_base, n_realizations),
    )


def trace_to_csv(trace: SimTrace, path) -> None:
    """Write a trace as CSV: k, t, states, held states, inputs, outputs, drop."""
    n = trace.x.shape[1]
    m = trace.u.shape[1]
    p = trace.y.shape[1]
    header = (["k", "t"]
              + [f"x{i+1}" for i in range(n)]
              + [f"xbar{i+1}" for i in range(n)]
              + (["u"] if m == 1 else [f"u{i+1}" for i in range(m)])
              + (["y"] if p == 1 else [f"y{i+1}" for i in range(p)])
              + ["dropped"])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(trace.x.shape[0]):
            writer.writerow(
                [k, k * trace.h]
                + list(trace.x[k]) + list(trace.x_held[k])
                + list(trace.u[k]) + list(trace.y[k])
                + [int(trace.dropped[k])]
            )
