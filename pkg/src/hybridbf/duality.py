"""Globally optimal fully-digital power minimization under SINR targets.

Solves

    min ||WD||_F^2   s.t.  SINR_k(WD) >= eta_k  for all k

through the virtual-uplink fixed point: with normalized channels
h_k = g_k / sigma_k, iterate

    q_k <- eta_k / ( h_k^H (I + sum_{j != k} q_j h_j h_j^H)^{-1} h_k )

to convergence, take MMSE directions u_k = (I + sum_j q_j h_j h_j^H)^{-1} h_k,
and load downlink powers from the K x K linear system that makes every SINR
constraint hold with equality.  The iteration is a standard interference
function: monotone from q = 0 and convergent exactly when the target set is
feasible, which is how infeasibility is detected (divergence past a cap).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, Infeasible, NoConvergence
from .model import ChannelSet, FullDigitalBeamformer, SinrTargets, all_sinr, normalize_phases

FP_TOL = 1e-10
MAX_ITERS = 10_000
Q_MAX = 1e12
RCOND_MIN = 1e-12


@dataclass(frozen=True)
class DualityState:
    """Dual uplink powers at exit, with sweep count and last relative change."""

    q: np.ndarray
    iterations: int
    residual: float


@dataclass(frozen=True)
class FdSolveReport:
    WD: FullDigitalBeamformer
    power: float
    iterations: int
    feasible: bool
    sinr_slack: np.ndarray
    duality: DualityState


def _fixed_point(H: np.ndarray, eta: np.ndarray, fp_tol: float, max_iters: int,
                 q_max: float) -> DualityState:
    """Run the dual power iteration; raises on divergence or stagnation."""
    K, M = H.shape
    q = np.zeros(K)
    I = np.eye(M, dtype=np.complex128)
    res = np.inf
    for it in range(1, max_iters + 1):
        # T = I + sum_j q_j h_j h_j^H; per-user denominators h_k^H (T - q_k h_k h_k^H)^{-1} h_k
        T = I + (H.conj().T * q) @ H
        try:
            L = np.linalg.cholesky(T)
        except np.linalg.LinAlgError:  # pragma: no cover - T is PD by construction
            raise NoConvergence("uplink covariance lost positive definiteness")
        Y = np.linalg.solve(L, H.conj().T)
        TinvH = np.linalg.solve(L.conj().T, Y)  # columns T^{-1} h_k
        quad = np.real(np.einsum("km,mk->k", H, TinvH))  # h_k^H T^{-1} h_k
        # Downdate to exclude user k's own term via Sherman-Morrison:
        # h^H (T - q h h^H)^{-1} h = quad / (1 - q * quad)
        denom_own = 1.0 - q * quad
        if np.any(denom_own <= 0):
            raise Infeasible("dual fixed point diverged (rank-one downdate collapsed)")
        quad_excl = quad / denom_own
        q_new = eta / quad_excl
        if np.any(~np.isfinite(q_new)) or np.any(q_new > q_max):
            raise Infeasible("dual uplink powers exceeded the divergence cap")
        res = float(np.max(np.abs(q_new - q) / np.maximum(q_new, 1e-300)))
        q = q_new
        if res < fp_tol:
            return DualityState(q=q, iterations=it, residual=res)
    raise NoConvergence(
        f"dual fixed point missed tol {fp_tol:g} after {max_iters} sweeps (res {res:.3e})"
    )


def solve_fd(
    ch: ChannelSet,
    targets: SinrTargets,
    fp_tol: float = FP_TOL,
    max_iters: int = MAX_ITERS,
    q_max: float = Q_MAX,
) -> FdSolveReport:
    """Globally optimal fully-digital beamformer meeting all SINR targets.

    Raises Infeasible when the targets are jointly unattainable and
    NoConvergence when the fixed point stalls short of fp_tol.
    """
    if targets.K != ch.K:
        raise DimensionError("targets and channels disagree on K")
    if ch.K > ch.M:
        raise DimensionError("fully-digital solve requires K <= M")
    H = ch.G / np.sqrt(ch.sigma2)[:, None]  # rows h_k^H
    eta = targets.eta

    state = _fixed_point(H, eta, fp_tol, max_iters, q_max)

    # MMSE directions from the converged dual powers, unit-normalized.
    T = np.eye(ch.M, dtype=np.complex128) + (H.conj().T * state.q) @ H
    U = np.linalg.solve(T, H.conj().T)  # column k proportional to T^{-1} h_k
    U /= np.linalg.norm(U, axis=0, keepdims=True)

    # Equality power loading: Psi p = sigma2 with
    # Psi_kk = |g_k^H u_k|^2 / eta_k, Psi_ki = -|g_k^H u_i|^2 (i != k).
    cross = np.abs(ch.G @ U) ** 2
    Psi = -cross
    Psi[np.arange(ch.K), np.arange(ch.K)] = np.diag(cross) / eta
    if np.linalg.cond(Psi) > 1.0 / RCOND_MIN:
        raise Infeasible("power loading system is numerically singular")
    p = np.linalg.solve(Psi, ch.sigma2)
    if np.any(p < 0):
        raise Infeasible("power loading produced a negative downlink power")

    WD = normalize_phases(ch, U * np.sqrt(p)[None, :])
    slack = all_sinr(ch, WD, np.eye(ch.K)) - eta
    return FdSolveReport(
        WD=FullDigitalBeamformer(WD),
        power=float(np.linalg.norm(WD) ** 2),
        iterations=state.iterations,
        feasible=True,
        sinr_slack=slack,
        duality=state,
    )


def is_fd_feasible(ch: ChannelSet, targets: SinrTargets, max_iters: int = 2000) -> bool:
    """Capped run of the fixed point; False on divergence or stagnation."""
    try:
        solve_fd(ch, targets, max_iters=max_iters)
    except (Infeasible, NoConvergence):
        return False
    return True
