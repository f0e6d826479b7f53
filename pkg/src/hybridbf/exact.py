"""Exact hybrid construction for K <= N.

Any fully-digital optimum WD can be factored through N >= K chains without
losing a single watt: pick any digital matrix W with linearly independent
columns and set V = WD (W^H W)^{-1} W^H, so that V W = WD exactly.  The pair
(V, W) therefore meets every SINR constraint at the fully-digital optimum
power, which is also a lower bound for the hybrid problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import duality
from .errors import DimensionError
from .model import ChannelSet, HybridBeamformer, SinrTargets, all_sinr

COND_FLOOR = 1e-3  # smallest/largest singular value of the digital seed
MAX_SEED_TRIES = 50


@dataclass(frozen=True)
class ExactReport:
    power: float
    fd: duality.FdSolveReport
    feasible: bool
    sinr_slack: np.ndarray
    seed_tries: int


def construct_digital_seed(N: int, K: int, seed: int = 0) -> tuple[np.ndarray, int]:
    """N x K complex Gaussian matrix with well-conditioned independent columns.

    Redraws while the singular-value ratio is below the conditioning floor;
    after the bounded retry budget, falls back to identity padding [I_K; 0].
    Returns the matrix and the number of draws used (0 for the fallback).
    """
    if K > N:
        raise DimensionError("digital seed needs K <= N")
    rng = np.random.default_rng(seed)
    for tries in range(1, MAX_SEED_TRIES + 1):
        W = (rng.standard_normal((N, K)) + 1j * rng.standard_normal((N, K))) / np.sqrt(2)
        s = np.linalg.svd(W, compute_uv=False)
        if s[-1] >= COND_FLOOR * s[0]:
            return W, tries
    return np.vstack([np.eye(K), np.zeros((N - K, K))]).astype(np.complex128), 0


def solve_exact(
    ch: ChannelSet,
    targets: SinrTargets,
    N: int,
    seed: int = 0,
    w_star: np.ndarray | None = None,
    **fd_opts,
) -> tuple[HybridBeamformer, ExactReport]:
    """Globally optimal hybrid pair for K <= N < M.

    Solves the fully-digital problem, then factors its optimum through the
    digital seed.  ``w_star`` overrides the random seed matrix (it must have
    independent columns).  Propagates Infeasible from the digital solve.
    """
    if not ch.K <= N:
        raise DimensionError("exact construction requires K <= N; route K > N "
                             "to the penalty solver")
    if not N < ch.M:
        raise DimensionError("hybrid beamforming assumes N < M")

    fd = duality.solve_fd(ch, targets, **fd_opts)

    if w_star is not None:
        W = np.asarray(w_star, dtype=np.complex128)
        if W.shape != (N, ch.K):
            raise DimensionError(f"w_star must be {N} x {ch.K}")
        s = np.linalg.svd(W, compute_uv=False)
        if s[-1] <= 0:
            raise DimensionError("w_star columns are linearly dependent")
        tries = 0
    else:
        W, tries = construct_digital_seed(N, ch.K, seed)

    # V = WD (W^H W)^{-1} W^H via a Cholesky solve of the Gram system.
    gram = W.conj().T @ W
    cho = scipy.linalg.cho_factor(gram)
    V = fd.WD.WD @ scipy.linalg.cho_solve(cho, W.conj().T)

    hb = HybridBeamformer(V=V, W=W)
    slack = all_sinr(ch, V, W) - targets.eta
    report = ExactReport(
        power=float(np.linalg.norm(V @ W) ** 2),
        fd=fd,
        feasible=bool(np.all(slack >= -1e-6)),
        sinr_slack=slack,
        seed_tries=tries,
    )
    return hb, report
