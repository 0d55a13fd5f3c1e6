"""LTI plant models, zero-order-hold discretization, and the switched
closed-loop matrices of the lossy feedback loop.

The network is a switch on the sensor link: when a measurement packet
arrives the controller state follows the plant state, when it drops the
controller holds its last value.  Stacking (x, x_held) gives one linear
map per switch position; both are built here from (G, H, K).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import _as_matrix, expm


@dataclass(frozen=True)
class ContinuousPlant:
    """Continuous-time LTI plant dx/dt = A x + B u, y = C x."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = _as_matrix(self.A, "A")
        B = _as_matrix(self.B, "B")
        C = _as_matrix(self.C, "C")
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError(f"A must be square, got {A.shape}")
        if B.shape[0] != n:
            raise ValueError(f"B has {B.shape[0]} rows, expected {n}")
        if C.shape[1] != n:
            raise ValueError(f"C has {C.shape[1]} columns, expected {n}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class DiscretePlant:
    """Sampled plant x(k+1) = G x(k) + H u(k), y(k) = C x(k), step h."""

    G: np.ndarray
    H: np.ndarray
    C: np.ndarray
    h: float

    def __post_init__(self):
        G = _as_matrix(self.G, "G")
        H = _as_matrix(self.H, "H")
        C = _as_matrix(self.C, "C")
        n = G.shape[0]
        if G.shape != (n, n):
            raise ValueError(f"G must be square, got {G.shape}")
        if H.shape[0] != n:
            raise ValueError(f"H has {H.shape[0]} rows, expected {n}")
        if C.shape[1] != n:
            raise ValueError(f"C has {C.shape[1]} columns, expected {n}")
        if not self.h > 0:
            raise ValueError(f"sample time must be positive, got {self.h}")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "h", float(self.h))

    @property
    def n_states(self) -> int:
        return self.G.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.H.shape[1]


@dataclass(frozen=True)
class SwitchedClosedLoop:
    """The two stacked-state transition matrices of the lossy loop.

    phi1 applies when the packet is delivered (held state re-synchronized),
    phi2 when it drops (held state frozen).  p_tx is the probability of
    delivery at each step.
    """

    phi1: np.ndarray
    phi2: np.ndarray
    p_tx: float

    def __post_init__(self):
        phi1 = _as_matrix(self.phi1, "phi1")
        phi2 = _as_matrix(self.phi2, "phi2")
        if phi1.shape != phi2.shape or phi1.shape[0] != phi1.shape[1]:
            raise ValueError(
                f"phi1/phi2 must be square with equal shape, got "
                f"{phi1.shape} and {phi2.shape}"
            )
        if phi1.shape[0] % 2 != 0:
            raise ValueError("stacked matrices must have even dimension")
        if not 0.0 < self.p_tx < 1.0:
            raise ValueError(
                f"transmission probability must be in (0, 1), got {self.p_tx}"
            )
        object.__setattr__(self, "phi1", phi1)
        object.__setattr__(self, "phi2", phi2)
        object.__setattr__(self, "p_tx", float(self.p_tx))

    @property
    def dim(self) -> int:
        return self.phi1.shape[0]


def discretize_zoh(plant: ContinuousPlant, h: float) -> DiscretePlant:
    """Zero-order-hold discretization with sample time h.

    G = e^{A h} and H = (integral of e^{A s} ds over [0, h]) B, both read
    off the exponential of the augmented block matrix [[A, B], [0, 0]].
    The augmented form needs no inverse of A, so plants with integrators
    work unchanged.
    """
    if not h > 0:
        raise ValueError(f"sample time must be positive, got {h}")
    n = plant.n_states
    m = plant.n_inputs
    M = np.zeros((n + m, n + m))
    M[:n, :n] = plant.A
    M[:n, n:] = plant.B
    E = expm(M, h)
    return DiscretePlant(G=E[:n, :n], H=E[:n, n:], C=plant.C, h=h)


def closed_loop_phi(d: DiscretePlant, K, p_tx: float) -> SwitchedClosedLoop:
    """Build the delivered/dropped stacked transition matrices for gain K.

    phi1 = [[G, -HK], [G, -HK]] and phi2 = [[G, -HK], [0, I]].
    """
    K = np.atleast_2d(np.asarray(K, dtype=float))
    n = d.n_states
    if K.shape != (d.n_inputs, n):
        raise ValueError(
            f"gain must be {d.n_inputs}x{n} for this plant, got {K.shape}"
        )
    HK = d.H @ K
    phi1 = np.block([[d.G, -HK], [d.G, -HK]])
    phi2 = np.block([[d.G, -HK], [np.zeros((n, n)), np.eye(n)]])
    return SwitchedClosedLoop(phi1=phi1, phi2=phi2, p_tx=p_tx)
