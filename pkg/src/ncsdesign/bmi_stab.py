"""Certification of a feedback gain under random packet loss.

The bilinear stability conditions are split: a genetic algorithm proposes
decay scalar pairs (a1, a2), an LMI feasibility oracle checks each pair,
and the run stops at the first pair whose decay product exceeds one (the
fitness 1 - a1^r a2^(1-r) turning negative).  Every accepted result is
re-verified from scratch before it is reported, so a certificate can never
be produced by search artifacts alone.

The feasible-and-decaying set is typically a thin sliver near the largest
a1 the closed loop admits, so the initial population is seeded with a few
deterministic pairs constructed from the estimated spectral radius of the
delivered-mode matrix; the rest of the population is random and the GA
proceeds normally from there.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ga import GaConfig, ga_minimize
from .linalg import spectral_radius_estimate
from .lmi import (
    DEFAULT_LMI_BUDGET,
    StabilityCertificate,
    _feasibility_query,
    verify_certificate,
)
from .plant import DiscretePlant, SwitchedClosedLoop, closed_loop_phi

# Search box for the decay scalars: the delivered mode must contract
# (a1 > 1); the hold mode contains an identity block, so a2 <= 1 always.
A1_BOUNDS = (1.0 + 1e-6, 1.5)
A2_BOUNDS = (0.5, 1.0)


@dataclass(frozen=True)
class StabilityResult:
    certified: bool
    certificate: Optional[StabilityCertificate]
    generations_used: int
    evaluations: int


def bmi_fitness(a1: float, a2: float, cl: SwitchedClosedLoop,
                lmi_budget: int = DEFAULT_LMI_BUDGET, seed: int = 0,
                tol_lmi: float = 1e-8) -> float:
    """Fitness of a scalar pair: negative exactly when a certificate exists.

    Feasible pairs score 1 - a1^r a2^(1-r); infeasible ones score one plus
    the degree of infeasibility, which always ranks them strictly worse.
    """
    P, degree = _feasibility_query(cl, a1, a2, lmi_budget, seed, tol_lmi)
    if P is not None:
        return 1.0 - a1 ** cl.p_tx * a2 ** (1.0 - cl.p_tx)
    return 1.0 + degree


def _seed_pairs(cl: SwitchedClosedLoop) -> list:
    """Deterministic starting pairs near the feasible, decaying sliver."""
    rho1 = spectral_radius_estimate(cl.phi1)
    if rho1 <= 0:
        return []
    cap = min(A1_BOUNDS[1], 1.0 / rho1)
    if cap <= A1_BOUNDS[0]:
        return []
    p = cl.p_tx
    pairs = []
    for frac in (0.99, 0.97, 0.93, 0.85):
        a1 = 1.0 + frac * (cap - 1.0)
        for decay_target in (1.0003, 1.002):
            a2 = (decay_target / a1 ** p) ** (1.0 / (1.0 - p))
            if A2_BOUNDS[0] <= a2 <= A2_BOUNDS[1]:
                pairs.append(np.array([a1, a2]))
    return pairs


def certify_gain(d: DiscretePlant, K, p_tx: float,
                 ga_config: Optional[GaConfig] = None,
                 lmi_budget: int = DEFAULT_LMI_BUDGET,
                 tol_lmi: float = 1e-8,
                 seed_initial_population: bool = True) -> StabilityResult:
    """Search for a stability certificate of gain K at delivery rate p_tx.

    Runs the GA over (a1, a2) with the LMI oracle as fitness, stopping at
    the first feasible pair with decay product above one.  An uncertified
    outcome is a value, not an error.
    """
    cl = closed_loop_phi(d, K, p_tx)
    if ga_config is None:
        ga_config = GaConfig(bounds=(A1_BOUNDS, A2_BOUNDS), max_generations=50)

    def fitness(x):
        return bmi_fitness(x[0], x[1], cl, lmi_budget=lmi_budget,
                           seed=ga_config.seed, tol_lmi=tol_lmi)

    seeds = _seed_pairs(cl) if seed_initial_population else None
    run = ga_minimize(fitness, ga_config,
                      early_stop=lambda f: f < 0.0,
                      initial_points=seeds)
    if run.best_fitness >= 0.0:
        return StabilityResult(certified=False, certificate=None,
                               generations_used=run.generations_used,
                               evaluations=run.evaluations)

    a1, a2 = run.best_point
    P, _ = _feasibility_query(cl, float(a1), float(a2), lmi_budget,
                              ga_config.seed, tol_lmi)
    if P is None:
        return StabilityResult(certified=False, certificate=None,
                               generations_used=run.generations_used,
                               evaluations=run.evaluations)
    cert = verify_certificate(cl, float(a1), float(a2), P, tol_lmi=tol_lmi)
    return StabilityResult(
        certified=bool(cert.valid),
        certificate=cert,
        generations_used=run.generations_used,
        evaluations=run.evaluations,
    )
