"""YAML configuration loading for the command-line tools.

A single file describes the plant, the network, the optimizer budgets and
the simulation settings; every omitted key falls back to the package
default.  Plant matrices are written as row-major lists of rows.

Minimal example::

    plant:
      type: continuous
      A: [[0, 1], [0, -0.1]]
      B: [[0], [0.1]]
      C: [[1, 0]]
    sample_time: 0.3
    transmission_probability: 0.7
    master_seed: 0

Optional sections: ``weight_bounds`` (low/high log10 lists for q1..qn, R),
``optimizer`` (regpso or ga), ``outer`` (population, iterations),
``certification`` (population, generations, lmi_budget, tolerance),
``simulation`` (steps, realizations, report_realizations, ref_amplitude),
``penalty_value``, ``weights`` (q_diag, r_value, for the lqr/certify/
simulate commands) and ``gain`` (row-major gain matrix, overrides
``weights`` where a gain is needed).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import yaml

from .lqr import LqrWeights
from .plant import ContinuousPlant, DiscretePlant, discretize_zoh
from .synth import CertificationSettings, SimSettings, SynthConfig


class ConfigError(ValueError):
    """Configuration file missing, malformed, or inconsistent."""


@dataclass(frozen=True)
class LoadedConfig:
    synth: SynthConfig
    weights: Optional[LqrWeights]
    gain: Optional[np.ndarray]


def _matrix(section: dict, key: str, context: str) -> np.ndarray:
    if key not in section:
        raise ConfigError(f"{context}: missing matrix {key!r}")
    try:
        M = np.array(section[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{context}: matrix {key!r} is not numeric") from exc
    if M.ndim == 1:
        M = M[None, :]
    if M.ndim != 2:
        raise ConfigError(f"{context}: matrix {key!r} must be a list of rows")
    return M


def _section(data: dict, key: str) -> dict:
    value = data.get(key, {})
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"section {key!r} must be a mapping")
    return value


def _load_plant(data: dict) -> DiscretePlant:
    section = _section(data, "plant")
    if not section:
        raise ConfigError("missing 'plant' section")
    kind = section.get("type", "continuous")
    h = data.get("sample_time")
    if h is None:
        raise ConfigError("missing 'sample_time'")
    try:
        h = float(h)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"sample_time must be a number, got {h!r}") from exc
    try:
        if kind == "continuous":
            plant = ContinuousPlant(
                A=_matrix(section, "A", "plant"),
                B=_matrix(section, "B", "plant"),
                C=_matrix(section, "C", "plant"),
            )
            return discretize_zoh(plant, h)
        if kind == "discrete":
            return DiscretePlant(
                G=_matrix(section, "G", "plant"),
                H=_matrix(section, "H", "plant"),
                C=_matrix(section, "C", "plant"),
                h=h,
            )
    except ValueError as exc:
        raise ConfigError(f"invalid plant: {exc}") from exc
    raise ConfigError(
        f"plant type must be 'continuous' or 'discrete', got {kind!r}"
    )


def load_config(path) -> LoadedConfig:
    """Parse a YAML configuration file into a validated SynthConfig."""
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a top-level mapping")

    plant = _load_plant(data)
    n = plant.n_states

    if "transmission_probability" not in data:
        raise ConfigError("missing 'transmission_probability'")
    p_tx = data["transmission_probability"]

    wb = _section(data, "weight_bounds")
    low = np.asarray(wb.get("low", [-2.0] * (n + 1)), dtype=float)
    high = np.asarray(wb.get("high", [2.0] * (n + 1)), dtype=float)

    outer = _section(data, "outer")
    cert = _section(data, "certification")
    simc = _section(data, "simulation")

    try:
        synth = SynthConfig(
            plant=plant,
            p_tx=float(p_tx),
            weight_low=low,
            weight_high=high,
            optimizer=data.get("optimizer", "regpso"),
            outer_population=int(outer.get("population", 20)),
            outer_iterations=int(outer.get("iterations", 30)),
            certification=CertificationSettings(
                population_size=int(cert.get("population", 20)),
                elite_count=int(cert.get("elite_count", 2)),
                max_generations=int(cert.get("generations", 50)),
                lmi_budget=int(cert.get("lmi_budget", 200)),
                tol_lmi=float(cert.get("tolerance", 1e-8)),
            ),
            sim=SimSettings(
                n_steps=int(simc.get("steps", 100)),
                ref_amplitude=float(simc.get("ref_amplitude", 1.0)),
                realizations=int(simc.get("realizations", 20)),
                report_realizations=int(simc.get("report_realizations", 200)),
            ),
            penalty_value=float(data.get("penalty_value", 1e6)),
            master_seed=int(data.get("master_seed", 0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc

    weights = None
    if "weights" in data and data["weights"] is not None:
        wsec = _section(data, "weights")
        try:
            weights = LqrWeights(
                q_diag=np.asarray(wsec["q_diag"], dtype=float),
                r_value=float(wsec["r_value"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid weights section: {exc}") from exc

    gain = None
    if "gain" in data and data["gain"] is not None:
        try:
            gain = np.atleast_2d(np.asarray(data["gain"], dtype=float))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid gain: {exc}") from exc
        if gain.shape != (plant.n_inputs, n):
            raise ConfigError(
                f"gain must be {plant.n_inputs}x{n}, got {gain.shape}"
            )

    return LoadedConfig(synth=synth, weights=weights, gain=gain)
