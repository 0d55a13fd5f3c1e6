"""Discrete-time LQR synthesis for the nominal (lossless) plant.

The Riccati solution is obtained by the plain fixed-point iteration

    P <- Q + G'PG - G'PH (R + H'PH)^-1 H'PG

starting from P0 = Q, re-symmetrizing every step.  At the 2-to-5 state
sizes handled here this is simple, robust, and the converged residual is
checked explicitly, so a silent wrong answer cannot escape.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    NotPositiveDefiniteError,
    min_eigenvalue,
    solve_spd,
    spectral_radius_estimate,
    symmetrize,
)
from .plant import DiscretePlant

_MAX_ITERATIONS = 10_000
_REL_TOL = 1e-12


class DareNotConvergedError(RuntimeError):
    """Fixed-point DARE iteration hit its cap or lost definiteness."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class LqrWeights:
    """Diagonal state weights and a scalar control weight.

    The search spaces in this package are diagonal-Q / scalar-R by design;
    that keeps the outer weight optimization three-dimensional for the
    two-state reference plant.
    """

    q_diag: np.ndarray
    r_value: float

    def __post_init__(self):
        q = np.asarray(self.q_diag, dtype=float).ravel()
        if q.size == 0 or np.any(q < 0) or not np.any(q > 0):
            raise ValueError(
                "state weights must be non-negative with at least one "
                f"positive entry, got {q}"
            )
        if not self.r_value > 0:
            raise ValueError(f"control weight must be positive, got {self.r_value}")
        object.__setattr__(self, "q_diag", q)
        object.__setattr__(self, "r_value", float(self.r_value))

    @property
    def Q(self) -> np.ndarray:
        return np.diag(self.q_diag)

    @property
    def R(self) -> np.ndarray:
        return np.array([[self.r_value]])


@dataclass(frozen=True)
class LqrDesign:
    weights: LqrWeights
    P: np.ndarray
    K: np.ndarray
    nominal_spectral_radius: float


def lqr_gain(P, d: DiscretePlant, w: LqrWeights) -> np.ndarray:
    """K = (R + H'PH)^-1 H'PG for a given symmetric PSD P."""
    P = symmetrize(P)
    S = w.R + d.H.T @ P @ d.H
    S = symmetrize(S)
    return solve_spd(S, d.H.T @ P @ d.G)


def solve_dare(d: DiscretePlant, w: LqrWeights) -> LqrDesign:
    """Solve the discrete algebraic Riccati equation and return the design.

    Raises DareNotConvergedError when the iteration cap is reached or
    R + H'PH stops being positive definite (an unstabilizable combination).
    """
    if w.q_diag.size != d.n_states:
        raise ValueError(
            f"need {d.n_states} state weights, got {w.q_diag.size}"
        )
    if d.n_inputs != 1:
        raise ValueError("scalar-R design supports single-input plants only")
    G, H, Q, R = d.G, d.H, w.Q, w.R
    P = Q.copy()
    residual = np.inf
    for _ in range(_MAX_ITERATIONS):
        HPG = H.T @ P @ G
        S = R + H.T @ P @ H
        try:
            correction = G.T @ P @ H @ solve_spd(symmetrize(S), HPG)
        except NotPositiveDefiniteError as exc:
            raise DareNotConvergedError(
                "DARE did not converge: R + H'PH lost positive definiteness",
                residual if np.isfinite(residual) else float("nan"),
            ) from exc
        P_next = symmetrize(Q + G.T @ P @ G - correction)
        residual = float(np.linalg.norm(P_next - P, "fro"))
        if not np.isfinite(residual):
            raise DareNotConvergedError("DARE iteration diverged", residual)
        P = P_next
        if residual <= _REL_TOL * (1.0 + np.linalg.norm(P, "fro")):
            break
    else:
        raise DareNotConvergedError("DARE did not converge", residual)

    K = lqr_gain(P, d, w)
    rho = spectral_radius_estimate(G - H @ K)
    if min_eigenvalue(P) < -1e-10:
        raise DareNotConvergedError(
            "DARE produced an indefinite solution", residual
        )
    return LqrDesign(weights=w, P=P, K=np.atleast_2d(K),
                     nominal_spectral_radius=rho)


def nominal_cost(P, x0) -> float:
    """Optimal infinite-horizon quadratic cost from state x0: x0'Px0 / 2."""
    P = symmetrize(P)
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.size != P.shape[0]:
        raise ValueError(f"state has {x0.size} entries, expected {P.shape[0]}")
    return float(0.5 * x0 @ P @ x0)
