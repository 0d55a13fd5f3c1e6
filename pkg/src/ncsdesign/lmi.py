"""Feasibility oracle and exact verifier for the switched-loop Lyapunov LMIs.

For fixed decay scalars (a1, a2) the stability conditions reduce to linear
matrix inequalities in one symmetric matrix P:

    a1^-2 P - phi1' P phi1 >= 0
    a2^-2 P - phi2' P phi2 >= 0
    P >= mu I,   mu = 1e-6 tr(P) / dim   (strictness floor)

``find_feasible_p`` searches for such a P; ``verify_certificate`` recomputes
every margin from scratch with a symmetric eigensolver and is the single
source of truth for validity.  The oracle is one-sided: a returned P is
always verified, while "none" only means "not found within budget".

The search solves the max-margin semidefinite program (maximize t with all
three blocks >= t I and tr P = dim) through Clarabel's conic interface; a
first-order fallback (exponentially smoothed minimum eigenvalue ascent with
seeded restarts) covers the rare case of a solver failure.  Candidates whose
scaled mode matrix a_s phi_s is spectrally unstable are rejected up front:
no positive definite P can exist for them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .linalg import spectral_radius_estimate, symmetrize
from .plant import SwitchedClosedLoop

_SQ2 = np.sqrt(2.0)
_FLOOR_COEF = 1e-6  # strictness floor relative to the mean eigenvalue
_MIN_MARGIN = 1e-8  # smallest SDP margin accepted as a genuine interior point

DEFAULT_LMI_BUDGET = 200


@dataclass(frozen=True)
class StabilityCertificate:
    """Witness (a1, a2, P) with its exactly recomputed margins.

    margin1/margin2 are the smallest eigenvalues of the two mode residuals
    a_s^-2 P - phi_s' P phi_s, margin_p is lambda_min(P) minus the
    positivity floor, and decay_product = a1^p_tx * a2^(1 - p_tx) must
    exceed one for exponential stability.
    """

    a1: float
    a2: float
    P: np.ndarray
    margin_p: float
    margin1: float
    margin2: float
    decay_product: float
    tol_lmi: float
    valid: bool


def _floor(P: np.ndarray) -> float:
    return _FLOOR_COEF * float(np.trace(P)) / P.shape[0]


def _mode_residual(P: np.ndarray, phi: np.ndarray, a: float) -> np.ndarray:
    return symmetrize(P / a**2 - phi.T @ P @ phi)


def _max_violation(P: np.ndarray, cl: SwitchedClosedLoop,
                   a1: float, a2: float) -> float:
    """phi(P): the largest constraint violation (negative when feasible)."""
    v1 = -float(np.linalg.eigvalsh(_mode_residual(P, cl.phi1, a1))[0])
    v2 = -float(np.linalg.eigvalsh(_mode_residual(P, cl.phi2, a2))[0])
    v3 = _floor(P) - float(np.linalg.eigvalsh(symmetrize(P))[0])
    return max(v1, v2, v3)


def verify_certificate(cl: SwitchedClosedLoop, a1: float, a2: float, P,
                       tol_lmi: float = 1e-8) -> StabilityCertificate:
    """Recompute all margins of a proposed certificate exactly.

    Validity requires margin_p >= 0, both mode margins >= -tol_lmi, and a
    decay product strictly above one.
    """
    if not (a1 > 0 and a2 > 0):
        raise ValueError(f"decay scalars must be positive, got ({a1}, {a2})")
    P = symmetrize(np.asarray(P, dtype=float))
    if P.shape != (cl.dim, cl.dim):
        raise ValueError(
            f"P must be {cl.dim}x{cl.dim} for this loop, got {P.shape}"
        )
    margin1 = float(np.linalg.eigvalsh(_mode_residual(P, cl.phi1, a1))[0])
    margin2 = float(np.linalg.eigvalsh(_mode_residual(P, cl.phi2, a2))[0])
    margin_p = float(np.linalg.eigvalsh(P)[0]) - _floor(P)
    decay = float(a1 ** cl.p_tx * a2 ** (1.0 - cl.p_tx))
    valid = (
        margin_p >= 0.0
        and margin1 >= -tol_lmi
        and margin2 >= -tol_lmi
        and decay > 1.0
    )
    return StabilityCertificate(
        a1=float(a1), a2=float(a2), P=P,
        margin_p=margin_p, margin1=margin1, margin2=margin2,
        decay_product=decay, tol_lmi=float(tol_lmi), valid=valid,
    )


# --- max-margin SDP (primary search) -------------------------------------

def _svec_indices(d: int):
    return np.tril_indices(d)


def _svec(M: np.ndarray, rows, cols) -> np.ndarray:
    v = M[rows, cols].copy()
    v[rows != cols] *= _SQ2
    return v


def _smat(v: np.ndarray, d: int, rows, cols) -> np.ndarray:
    M = np.zeros((d, d))
    w = v.copy()
    w[rows != cols] /= _SQ2
    M[rows, cols] = w
    M[cols, rows] = w
    return M


def _solve_max_margin(cl: SwitchedClosedLoop, a1: float, a2: float,
                      max_iter: int):
    """Maximize t s.t. all three LMI blocks >= t I, tr P = dim.

    Returns (P, t) where t is the achieved margin; P has trace dim.
    Raises on solver failure so the caller can fall back.
    """
    import clarabel
    from scipy import sparse

    d = cl.dim
    rows, cols = _svec_indices(d)
    npv = len(rows)
    basis = []
    for r, c in zip(rows, cols):
        E = np.zeros((d, d))
        if r == c:
            E[r, c] = 1.0
        else:
            E[r, c] = E[c, r] = 1.0 / _SQ2
        basis.append(E)

    blocks = []
    b = [float(d)]
    trace_row = np.zeros(npv + 1)
    trace_row[:npv] = [1.0 if r == c else 0.0 for r, c in zip(rows, cols)]
    blocks.append(trace_row.reshape(1, -1))

    svec_eye = _svec(np.eye(d), rows, cols)

    def add_block(mapping, const):
        blk = np.empty((npv, npv + 1))
        for k, Ek in enumerate(basis):
            blk[:, k] = -_svec(mapping(Ek), rows, cols)
        blk[:, npv] = svec_eye
        blocks.append(blk)
        b.extend(_svec(const, rows, cols).tolist())

    add_block(lambda X: X / a1**2 - cl.phi1.T @ X @ cl.phi1, np.zeros((d, d)))
    add_block(lambda X: X / a2**2 - cl.phi2.T @ X @ cl.phi2, np.zeros((d, d)))
    add_block(lambda X: X, _FLOOR_COEF * np.eye(d))

    A = sparse.csc_matrix(np.vstack(blocks))
    q = np.zeros(npv + 1)
    q[npv] = -1.0
    cones = [clarabel.ZeroConeT(1)] + [clarabel.PSDTriangleConeT(d)] * 3
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.max_iter = max(10, int(max_iter))
    solver = clarabel.DefaultSolver(
        sparse.csc_matrix((npv + 1, npv + 1)), q, A, np.array(b), cones,
        settings,
    )
    sol = solver.solve()
    status = str(sol.status)
    if status not in ("SolverStatus.Solved", "Solved", "SolverStatus.AlmostSolved",
                      "AlmostSolved"):
        raise RuntimeError(f"margin SDP not solved: {status}")
    z = np.asarray(sol.x, dtype=float)
    if not np.all(np.isfinite(z)):
        raise RuntimeError("margin SDP returned non-finite solution")
    P = symmetrize(_smat(z[:npv], d, rows, cols))
    return P, float(z[npv])


# --- smoothed first-order fallback ----------------------------------------

def _traceless_basis_vec(d: int):
    rows, cols = _svec_indices(d)
    return rows, cols


def _smoothed_search(cl: SwitchedClosedLoop, a1: float, a2: float,
                     budget: int, seed: int):
    """Maximize the smoothed minimum margin by quasi-Newton ascent.

    Trace is pinned at dim through the parametrization; starts from the
    identity, with up to five seeded random SPD restarts when a smoothing
    stage ends infeasible.  Returns (P or None, best violation reached).
    """
    d = cl.dim
    rows, cols = _svec_indices(d)
    rng = np.random.default_rng(seed)

    def P_of(theta):
        B = _smat(theta, d, rows, cols)
        B -= (np.trace(B) / d) * np.eye(d)
        return np.eye(d) + B

    def objective(theta, tau):
        P = P_of(theta)
        lams, parts = [], []
        for phi, a in ((cl.phi1, a1), (cl.phi2, a2)):
            w, V = np.linalg.eigh(_mode_residual(P, phi, a))
            lams.append(w)
            parts.append((V, phi, a))
        w, V = np.linalg.eigh(P)
        lams.append(w - _FLOOR_COEF)
        parts.append((V, None, None))
        allw = np.concatenate(lams)
        wmin = allw.min()
        z = np.exp(-(allw - wmin) / tau)
        S = z.sum()
        f = -(wmin - tau * np.log(S))
        gradP = np.zeros((d, d))
        idx = 0
        for w, (V, phi, a) in zip(lams, parts):
            wts = z[idx:idx + d] / S
            idx += d
            VW = V * wts
            if phi is None:
                gradP += VW @ V.T
            else:
                U = phi @ V
                gradP += (VW @ V.T) / a**2 - (U * wts) @ U.T
        gradP = symmetrize(gradP)
        gradP -= (np.trace(gradP) / d) * np.eye(d)
        return f, -_svec(gradP, rows, cols)

    theta = np.zeros(len(rows))
    used = 0
    best_phi = np.inf
    restarts = 0
    while used < budget:
        for tau in (1e-1, 1e-2, 1e-3):
            if used >= budget:
                break
            res = scipy.optimize.minimize(
                objective, theta, args=(tau,), jac=True, method="L-BFGS-B",
                options={"maxiter": max(1, min(120, budget - used))},
            )
            theta = res.x
            used += max(int(res.nit), 1)
            P = P_of(theta)
            phi = _max_violation(P, cl, a1, a2)
            best_phi = min(best_phi, phi)
            if phi < -_MIN_MARGIN:
                return P, best_phi
        if restarts >= 5:
            break
        M = rng.standard_normal((d, d))
        P0 = M @ M.T + 1e-3 * np.eye(d)
        P0 *= d / np.trace(P0)
        theta = _svec(P0 - np.eye(d), rows, cols)
        restarts += 1
    return None, best_phi


# --- public oracle ---------------------------------------------------------

def _feasibility_query(cl: SwitchedClosedLoop, a1: float, a2: float,
                       budget: int, seed: int, tol_lmi: float):
    """Shared search core: returns (P or None, degree of infeasibility)."""
    if not (a1 > 0 and a2 > 0):
        raise ValueError(f"decay scalars must be positive, got ({a1}, {a2})")
    d = cl.dim
    # Spectral necessity. The inequalities with P > 0 force
    # rho(a_s phi_s) <= 1; reject without searching when it clearly fails.
    if (spectral_radius_estimate(a1 * cl.phi1) > 1.0 + 1e-6
            or spectral_radius_estimate(a2 * cl.phi2) > 1.0 + 1e-6):
        return None, max(0.0, _max_violation(np.eye(d), cl, a1, a2))

    try:
        P, t = _solve_max_margin(cl, a1, a2, max_iter=budget)
        if t > _MIN_MARGIN:
            cert = verify_certificate(cl, a1, a2, P, tol_lmi=tol_lmi)
            if cert.margin_p >= 0 and min(cert.margin1, cert.margin2) >= -tol_lmi:
                return cert.P, 0.0
        return None, max(0.0, -t)
    except Exception:
        pass

    P, best_phi = _smoothed_search(cl, a1, a2, budget=budget, seed=seed)
    if P is not None:
        cert = verify_certificate(cl, a1, a2, P, tol_lmi=tol_lmi)
        if cert.margin_p >= 0 and min(cert.margin1, cert.margin2) >= -tol_lmi:
            return cert.P, 0.0
    return None, max(0.0, best_phi)


def find_feasible_p(cl: SwitchedClosedLoop, a1: float, a2: float,
                    budget: int = DEFAULT_LMI_BUDGET, seed: int = 0,
                    tol_lmi: float = 1e-8):
    """Search for a Lyapunov matrix satisfying both mode LMIs at (a1, a2).

    Returns a trace-normalized symmetric P that passed verify_certificate,
    or None when no verified P was found within the budget.  "None" is not
    a proof of infeasibility.
    """
    P, _ = _feasibility_query(cl, a1, a2, budget, seed, tol_lmi)
    return P


def degree_of_infeasibility(cl: SwitchedClosedLoop, a1: float, a2: float,
                            budget: int = DEFAULT_LMI_BUDGET,
                            seed: int = 0) -> float:
    """Best (smallest) constraint violation reached when searching (a1, a2).

    Zero when a feasible P was found; positive values rank infeasible
    candidates for the certification search.
    """
    _, degree = _feasibility_query(cl, a1, a2, budget, seed, tol_lmi=1e-8)
    return degree
