"""Problem data types and the SINR / power / SOC evaluators.

Conventions used throughout the library:

- ``G`` is the K x M channel matrix whose row k is the conjugated channel of
  user k, so ``G[k] @ x`` evaluates the inner product of that user's channel
  with a beamforming vector x.
- All user indices are 0-based (``0 <= k < K``).
- SINR thresholds ``eta`` and noise powers ``sigma2`` are linear scale, never dB.
- Arrays are complex128 / float64 and frozen (non-writeable) after validation,
  so every value object is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionError

# Default tolerances: Hermitian/PSD slack and linear-scale SINR feasibility.
EPS_PSD = 1e-9
FEAS_TOL = 1e-6


def _frozen_array(a, dtype):
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ChannelSet:
    """K x M channel matrix with per-user noise powers."""

    G: np.ndarray
    sigma2: np.ndarray

    def __post_init__(self):
        G = _frozen_array(self.G, np.complex128)
        if G.ndim != 2:
            raise DimensionError("G must be a K x M matrix")
        sigma2 = _frozen_array(np.atleast_1d(self.sigma2), np.float64)
        if sigma2.shape != (G.shape[0],):
            raise DimensionError("sigma2 must have one entry per user")
        if np.any(sigma2 <= 0):
            raise DimensionError("noise powers must be strictly positive")
        row_norms = np.linalg.norm(G, axis=1)
        if np.any(row_norms == 0):
            raise DimensionError("zero channel row")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "sigma2", sigma2)

    @property
    def K(self) -> int:
        return self.G.shape[0]

    @property
    def M(self) -> int:
        return self.G.shape[1]


@dataclass(frozen=True)
class SinrTargets:
    """Per-user linear SINR thresholds, strictly positive."""

    eta: np.ndarray

    def __post_init__(self):
        eta = _frozen_array(np.atleast_1d(self.eta), np.float64)
        if np.any(eta <= 0):
            # eta = 0 would divide the SOC scaling sqrt((1+eta)/eta) by zero.
            raise DimensionError("SINR targets must be strictly positive")
        object.__setattr__(self, "eta", eta)

    @property
    def K(self) -> int:
        return self.eta.shape[0]

    @classmethod
    def uniform(cls, K: int, eta: float) -> "SinrTargets":
        return cls(np.full(K, float(eta)))


@dataclass(frozen=True)
class HybridBeamformer:
    """Analog stage V (M x N) and digital stage W (N x K)."""

    V: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        V = _frozen_array(self.V, np.complex128)
        W = _frozen_array(self.W, np.complex128)
        if V.ndim != 2 or W.ndim != 2 or V.shape[1] != W.shape[0]:
            raise DimensionError("V (M x N) and W (N x K) dimensions disagree")
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "W", W)

    @property
    def M(self) -> int:
        return self.V.shape[0]

    @property
    def N(self) -> int:
        return self.V.shape[1]

    @property
    def K(self) -> int:
        return self.W.shape[1]

    def product(self) -> np.ndarray:
        """The effective M x K precoder V @ W."""
        return self.V @ self.W


@dataclass(frozen=True)
class FullDigitalBeamformer:
    """M x K precoder with one chain per antenna; column k serves user k."""

    WD: np.ndarray

    def __post_init__(self):
        WD = _frozen_array(self.WD, np.complex128)
        if WD.ndim != 2:
            raise DimensionError("WD must be M x K")
        object.__setattr__(self, "WD", WD)

    @property
    def M(self) -> int:
        return self.WD.shape[0]

    @property
    def K(self) -> int:
        return self.WD.shape[1]

    @property
    def power(self) -> float:
        return float(np.linalg.norm(self.WD) ** 2)


@dataclass(frozen=True)
class LiftedMatrix:
    """Hermitian PSD matrix of size (M+K) x (M+K) coupling analog and digital blocks.

    Block convention: the top-left M x M block is the analog block, the
    bottom-right K x K block the digital block, and the top-right M x K block
    equals the effective precoder V @ W whenever the matrix factors as
    ``stack(V, W^H) @ stack(V, W^H)^H``.
    """

    X: np.ndarray
    M: int

    def __post_init__(self):
        X = np.array(self.X, dtype=np.complex128)
        n = X.shape[0]
        if X.ndim != 2 or X.shape != (n, n) or not (0 < self.M < n):
            raise DimensionError("X must be square with 0 < M < M+K")
        herm_err = np.linalg.norm(X - X.conj().T)
        if herm_err > EPS_PSD * max(1.0, np.linalg.norm(X)):
            raise DimensionError("X is not Hermitian within tolerance")
        X = 0.5 * (X + X.conj().T)  # remove floating-point drift
        lo = np.linalg.eigvalsh(X)[0]
        if lo < -EPS_PSD * max(1.0, float(np.trace(X).real)):
            raise DimensionError(f"X has eigenvalue {lo:.3e} below the PSD floor")
        X.setflags(write=False)
        object.__setattr__(self, "X", X)

    @property
    def K(self) -> int:
        return self.X.shape[0] - self.M

    def coupling_block(self) -> np.ndarray:
        """Top-right M x K block, the lifted image of V @ W."""
        return self.X[: self.M, self.M :]


def sv_matrix(M: int, K: int) -> np.ndarray:
    """Selector [I_M, 0] reading the first M rows of a lifted factor."""
    return np.hstack([np.eye(M), np.zeros((M, K))]).astype(np.complex128)


def sw_matrix(M: int, K: int) -> np.ndarray:
    """Selector [0, I_K]^T reading the last K columns of a lifted factor's adjoint."""
    return np.vstack([np.zeros((M, K)), np.eye(K)]).astype(np.complex128)


def unit_dk(M: int, K: int, k: int) -> np.ndarray:
    """Unit vector with a one in position M+k."""
    d = np.zeros(M + K, dtype=np.complex128)
    d[M + k] = 1.0
    return d


def _check_pair(ch: ChannelSet, V: np.ndarray, W: np.ndarray):
    V = np.asarray(V, dtype=np.complex128)
    W = np.asarray(W, dtype=np.complex128)
    if V.shape[0] != ch.M or V.shape[1] != W.shape[0] or W.shape[1] != ch.K:
        raise DimensionError(
            f"beamformer shapes {V.shape} x {W.shape} inconsistent with "
            f"M={ch.M}, K={ch.K}"
        )
    return V, W


def sinr(ch: ChannelSet, V: np.ndarray, W: np.ndarray, k: int) -> float:
    """SINR of user k: |g_k^H V w_k|^2 / (sum_{i != k} |g_k^H V w_i|^2 + sigma_k^2)."""
    V, W = _check_pair(ch, V, W)
    if not 0 <= k < ch.K:
        raise DimensionError(f"user index {k} out of range")
    row = ch.G[k] @ (V @ W)  # entry i is g_k^H V w_i
    p = np.abs(row) ** 2
    signal = p[k]
    interference = p.sum() - signal
    return float(signal / (interference + ch.sigma2[k]))


def all_sinr(ch: ChannelSet, V: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Vector of all K SINRs in one pass."""
    V, W = _check_pair(ch, V, W)
    rows = ch.G @ (V @ W)  # K x K, entry (k, i) = g_k^H V w_i
    p = np.abs(rows) ** 2
    signal = np.diag(p)
    interference = p.sum(axis=1) - signal
    return signal / (interference + ch.sigma2)


def power(V: np.ndarray, W: np.ndarray) -> float:
    """Transmission power ||V W||_F^2."""
    V = np.asarray(V, dtype=np.complex128)
    W = np.asarray(W, dtype=np.complex128)
    if V.shape[1] != W.shape[0]:
        raise DimensionError("inner dimensions of V and W disagree")
    return float(np.linalg.norm(V @ W) ** 2)


def check_feasible(
    ch: ChannelSet,
    targets: SinrTargets,
    V: np.ndarray,
    W: np.ndarray,
    tol: float = FEAS_TOL,
) -> tuple[bool, np.ndarray]:
    """True iff every SINR clears its target within tol; also the slack vector."""
    if tol < 0:
        raise DimensionError("tol must be non-negative")
    if targets.K != ch.K:
        raise DimensionError("targets and channels disagree on K")
    slack = all_sinr(ch, V, W) - targets.eta
    return bool(np.all(slack >= -tol)), slack


class SocResidual(NamedTuple):
    residual: float
    signal_re: float
    signal_im: float


def soc_residual(
    ch: ChannelSet, targets: SinrTargets, V: np.ndarray, W: np.ndarray, k: int
) -> SocResidual:
    """Slack of user k's second-order-cone form of the SINR constraint.

    residual = sqrt((1+eta_k)/eta_k) * Re(g_k^H V w_k) - ||[(g_k^H V W)^H; sigma_k]||_2

    Non-negative residual means the cone constraint holds.  The constraint is
    equivalent to SINR_k >= eta_k only on the slice where g_k^H V w_k is real
    non-negative, so the real and imaginary parts of that inner product are
    reported alongside the residual.
    """
    V, W = _check_pair(ch, V, W)
    if not 0 <= k < ch.K:
        raise DimensionError(f"user index {k} out of range")
    eta_k = targets.eta[k]
    row = ch.G[k] @ (V @ W)
    lhs = np.sqrt((1.0 + eta_k) / eta_k) * row[k].real
    rhs = np.sqrt(np.sum(np.abs(row) ** 2) + ch.sigma2[k])
    return SocResidual(float(lhs - rhs), float(row[k].real), float(row[k].imag))


def normalize_phases(ch: ChannelSet, WD: np.ndarray) -> np.ndarray:
    """Rotate each column of an M x K precoder so g_k^H w_k is real non-negative.

    A diagonal phase scaling on the right changes neither the power nor any
    SINR, so this is a free normalization.
    """
    WD = np.asarray(WD, dtype=np.complex128)
    diag = np.einsum("km,mk->k", ch.G, WD)
    phases = np.where(np.abs(diag) > 0, diag / np.maximum(np.abs(diag), 1e-300), 1.0)
    return WD * phases.conj()[None, :]
