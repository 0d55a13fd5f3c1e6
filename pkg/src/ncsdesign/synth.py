"""End-to-end regulator synthesis: weight search, certification, scoring.

The outer optimizer proposes LQR weights in log10 coordinates, each
candidate is turned into a gain through the Riccati solve, the gain is
certified against packet loss, and certified designs are scored by the
Monte Carlo expected tracking cost.  Uncertified or failed candidates
receive a flat penalty far above any achievable cost, so the optimizer
can never prefer them.

One fixed set of loss-realization seeds is shared by every candidate in a
run (common random numbers): the stochastic objective becomes a
deterministic function of the configuration, at the cost of a small
seed-dependent bias that the reporting fidelity re-evaluation discloses.
"""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .bmi_stab import certify_gain
from .ga import GaConfig, ga_minimize
from .lmi import StabilityCertificate, verify_certificate
from .lqr import DareNotConvergedError, LqrWeights, solve_dare
from .plant import DiscretePlant, closed_loop_phi
from .regpso import RegPsoConfig, regpso_minimize
from .sim import CostEstimate, itae_over_seeds, realization_seeds

OPTIMIZER_ARMS = ("regpso", "ga")


@dataclass(frozen=True)
class CertificationSettings:
    population_size: int = 20
    elite_count: int = 2
    max_generations: int = 50
    lmi_budget: int = 200
    tol_lmi: float = 1e-8


@dataclass(frozen=True)
class SimSettings:
    n_steps: int = 100
    ref_amplitude: float = 1.0
    realizations: int = 20
    report_realizations: int = 200


@dataclass(frozen=True)
class SynthConfig:
    plant: DiscretePlant
    p_tx: float
    weight_low: np.ndarray    # log10 lower bounds for (q1..qn, R)
    weight_high: np.ndarray
    optimizer: str = "regpso"
    outer_population: int = 20
    outer_iterations: int = 30
    certification: CertificationSettings = field(
        default_factory=CertificationSettings)
    sim: SimSettings = field(default_factory=SimSettings)
    penalty_value: float = 1e6
    master_seed: object = 0

    def __post_init__(self):
        low = np.asarray(self.weight_low, dtype=float).ravel()
        high = np.asarray(self.weight_high, dtype=float).ravel()
        n = self.plant.n_states
        if low.size != n + 1 or high.size != n + 1:
            raise ValueError(
                f"weight bounds need {n + 1} entries (q1..q{n}, R), "
                f"got {low.size} and {high.size}"
            )
        if np.any(high <= low):
            raise ValueError("weight bounds must be non-degenerate")
        if self.optimizer not in OPTIMIZER_ARMS:
            raise ValueError(
                f"optimizer must be one of {OPTIMIZER_ARMS}, got "
                f"{self.optimizer!r}"
            )
        if not 0.0 < self.p_tx < 1.0:
            raise ValueError(
                f"transmission probability must be in (0, 1), got {self.p_tx}"
            )
        if self.plant.n_inputs != 1:
            raise ValueError("synthesis supports single-input plants only")
        if not self.penalty_value > 0:
            raise ValueError("penalty value must be positive")
        if self.outer_population < 2 or self.outer_iterations < 1:
            raise ValueError("outer optimizer budgets must be positive")
        object.__setattr__(self, "weight_low", low)
        object.__setattr__(self, "weight_high", high)


@dataclass(frozen=True)
class SynthesisResult:
    weights: LqrWeights
    gain: np.ndarray
    certificate: StabilityCertificate
    expected_cost: CostEstimate
    convergence: np.ndarray
    evaluations: int
    wall_time: float
    regroup_count: int = 0


class NoCertifiedDesignError(RuntimeError):
    """Raised when the weight search never produced a certified design."""

    def __init__(self, best_point, best_value, evaluations):
        super().__init__(
            "no certified design found within budget "
            f"(best objective {best_value:.6g} after {evaluations} "
            "evaluations)"
        )
        self.best_point = best_point
        self.best_value = best_value
        self.evaluations = evaluations


def weights_from_log10(theta, n_states: int) -> LqrWeights:
    theta = np.asarray(theta, dtype=float).ravel()
    return LqrWeights(q_diag=10.0 ** theta[:n_states],
                      r_value=float(10.0 ** theta[n_states]))


def _certification_ga_config(cfg: SynthConfig) -> GaConfig:
    from .bmi_stab import A1_BOUNDS, A2_BOUNDS

    return GaConfig(
        bounds=(A1_BOUNDS, A2_BOUNDS),
        max_generations=cfg.certification.max_generations,
        population_size=cfg.certification.population_size,
        elite_count=cfg.certification.elite_count,
        seed=(cfg.master_seed, 3),
    )


def _design_and_certify(w: LqrWeights, cfg: SynthConfig):
    """(LqrDesign, StabilityResult) for one weight candidate."""
    design = solve_dare(cfg.plant, w)
    result = certify_gain(
        cfg.plant, design.K, cfg.p_tx,
        ga_config=_certification_ga_config(cfg),
        lmi_budget=cfg.certification.lmi_budget,
        tol_lmi=cfg.certification.tol_lmi,
    )
    return design, result


def evaluate_weights(w: LqrWeights, cfg: SynthConfig, realization_seed_list,
                     cert_cache: Optional[dict] = None) -> float:
    """Objective value of one weight candidate under fixed loss seeds.

    Returns the penalty when the Riccati solve fails or the resulting gain
    cannot be certified; otherwise the mean tracking cost over the given
    realization seeds.
    """
    try:
        design = solve_dare(cfg.plant, w)
    except DareNotConvergedError:
        return cfg.penalty_value
    key = None
    if cert_cache is not None:
        key = np.round(design.K, 9).tobytes()
        certified = cert_cache.get(key)
    else:
        certified = None
    if certified is None:
        result = certify_gain(
            cfg.plant, design.K, cfg.p_tx,
            ga_config=_certification_ga_config(cfg),
            lmi_budget=cfg.certification.lmi_budget,
            tol_lmi=cfg.certification.tol_lmi,
        )
        certified = result.certified
        if cert_cache is not None:
            cert_cache[key] = certified
    if not certified:
        return cfg.penalty_value
    est = itae_over_seeds(cfg.plant, design.K, cfg.p_tx,
                          cfg.sim.ref_amplitude, cfg.sim.n_steps,
                          realization_seed_list)
    return est.mean


def synthesize(cfg: SynthConfig) -> SynthesisResult:
    """Run the configured outer optimizer and report the certified design.

    Raises NoCertifiedDesignError when every candidate scored the penalty.
    The returned certificate is re-verified from scratch at report time.
    """
    t_start = time.perf_counter()
    n = cfg.plant.n_states
    crn_seeds = realization_seeds((cfg.master_seed, 1),
                                  cfg.sim.realizations)
    cache: dict = {}

    def objective(theta):
        return evaluate_weights(weights_from_log10(theta, n), cfg,
                                crn_seeds, cache)

    bounds = list(zip(cfg.weight_low, cfg.weight_high))
    if cfg.optimizer == "regpso":
        run = regpso_minimize(objective, RegPsoConfig(
            bounds=bounds,
            max_iterations=cfg.outer_iterations,
            swarm_size=cfg.outer_population,
            seed=(cfg.master_seed, 2),
        ))
        regroups = run.regroup_count
    else:
        run = ga_minimize(objective, GaConfig(
            bounds=bounds,
            max_generations=cfg.outer_iterations,
            population_size=cfg.outer_population,
            seed=(cfg.master_seed, 2),
        ))
        regroups = 0

    if run.best_fitness >= cfg.penalty_value:
        raise NoCertifiedDesignError(run.best_point, run.best_fitness,
                                     run.evaluations)

    best_w = weights_from_log10(run.best_point, n)
    design, cert_result = _design_and_certify(best_w, cfg)
    if not cert_result.certified:
        raise NoCertifiedDesignError(run.best_point, run.best_fitness,
                                     run.evaluations)
    cert = cert_result.certificate
    # independent re-verification of the reported certificate
    cl = closed_loop_phi(cfg.plant, design.K, cfg.p_tx)
    recheck = verify_certificate(cl, cert.a1, cert.a2, cert.P,
                                 tol_lmi=cert.tol_lmi)
    if not recheck.valid:
        raise NoCertifiedDesignError(run.best_point, run.best_fitness,
                                     run.evaluations)

    report_seeds = realization_seeds((cfg.master_seed, 1),
                                     cfg.sim.report_realizations)
    cost = itae_over_seeds(cfg.plant, design.K, cfg.p_tx,
                           cfg.sim.ref_amplitude, cfg.sim.n_steps,
                           report_seeds)
    return SynthesisResult(
        weights=best_w,
        gain=design.K,
        certificate=recheck,
        expected_cost=cost,
        convergence=np.asarray(run.history, dtype=float),
        evaluations=run.evaluations,
        wall_time=time.perf_counter() - t_start,
        regroup_count=regroups,
    )


@dataclass(frozen=True)
class ArmStatistics:
    arm: str
    mean: float
    std: float
    best: float
    worst: float
    runs: int
    failed_runs: int
    per_run_costs: np.ndarray


def run_statistics(cfg: SynthConfig, n_runs: int,
                   arms=OPTIMIZER_ARMS) -> list:
    """Repeat synthesis with derived seeds and summarize each arm.

    Runs that never certify contribute the penalty value and are counted
    as failed.
    """
    if n_runs < 2:
        raise ValueError("statistics need at least two runs")
    out = []
    for arm in arms:
        costs = []
        failed = 0
        for i in range(n_runs):
            run_cfg = replace(cfg, optimizer=arm,
                              master_seed=(cfg.master_seed, 10, i))
            try:
                result = synthesize(run_cfg)
                costs.append(result.expected_cost.mean)
            except NoCertifiedDesignError:
                costs.append(cfg.penalty_value)
                failed += 1
        costs = np.array(costs)
        out.append(ArmStatistics(
            arm=arm,
            mean=float(np.mean(costs)),
            std=float(np.std(costs)),
            best=float(np.min(costs)),
            worst=float(np.max(costs)),
            runs=n_runs,
            failed_runs=failed,
            per_run_costs=costs,
        ))
    return out


def statistics_to_csv(stats, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["arm", "mean", "std", "best", "worst"])
        for s in stats:
            writer.writerow([s.arm, s.mean, s.std, s.best, s.worst])


def convergence_to_csv(history, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "best_cost"])
        for i, v in enumerate(np.asarray(history).ravel()):
            writer.writerow([i, v])


def result_to_dict(result: SynthesisResult) -> dict:
    """JSON-ready view of a synthesis result, certificate matrix included."""
    cert = result.certificate
    return {
        "weights": {
            "q_diag": result.weights.q_diag.tolist(),
            "r_value": result.weights.r_value,
        },
        "gain": result.gain.tolist(),
        "certificate": {
            "a1": cert.a1,
            "a2": cert.a2,
            "P": cert.P.tolist(),
            "margin_p": cert.margin_p,
            "margin1": cert.margin1,
            "margin2": cert.margin2,
            "decay_product": cert.decay_product,
            "tol_lmi": cert.tol_lmi,
            "valid": cert.valid,
        },
        "expected_cost": {
            "mean": result.expected_cost.mean,
            "std_dev": result.expected_cost.std_dev,
            "realizations": result.expected_cost.realizations,
        },
        "convergence": result.convergence.tolist(),
        "evaluations": result.evaluations,
        "wall_time": result.wall_time,
        "regroup_count": result.regroup_count,
    }
