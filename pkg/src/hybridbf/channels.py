"""One-ring correlated channel generation for a uniform linear array.

Each user k sees scatterers spread uniformly over [theta_k - Delta, theta_k + Delta]
around its azimuth angle theta_k, giving the covariance

    [R_k]_{m,p} = (1 / 2 Delta) * integral exp(j 2 pi d (m - p) sin(alpha)) d alpha

over that interval, with d the element spacing in wavelengths.  Channels are
drawn as g_k = R_k^{1/2} z_k with z_k standard complex Gaussian from a seeded
PCG64 generator, so a config with a fixed seed reproduces bit-identical draws
across runs and platforms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from .errors import DimensionError
from .model import ChannelSet


@dataclass(frozen=True)
class OneRingConfig:
    M: int
    K: int
    delta_deg: float = 15.0
    antenna_spacing: float = 0.5  # wavelengths; half-wavelength ULA default
    seed: int = 0
    quadrature_points: int = 200

    def __post_init__(self):
        if self.M < 1 or self.K < 1:
            raise DimensionError("M and K must be positive")
        if not 0.0 < self.delta_deg < 90.0:
            raise DimensionError("angular spread must lie in (0, 90) degrees")
        if self.antenna_spacing <= 0:
            raise DimensionError("antenna spacing must be positive")
        if self.quadrature_points < 32:
            raise DimensionError("need at least 32 quadrature points")
        if not 0 <= int(self.seed) < 2**64:
            raise DimensionError("seed must fit in 64 unsigned bits")


def user_angles(cfg: OneRingConfig) -> np.ndarray:
    """Azimuth angles theta_k = -180 + Delta + (k-1) * 360/K, wrapped to (-180, 180]."""
    k = np.arange(cfg.K)
    theta = -180.0 + cfg.delta_deg + k * (360.0 / cfg.K)
    wrapped = np.mod(theta + 180.0, 360.0) - 180.0
    # mod maps onto [-180, 180); fold the open endpoint up to +180
    return np.where(wrapped <= -180.0, wrapped + 360.0, wrapped)


def covariance(cfg: OneRingConfig, k: int) -> np.ndarray:
    """Hermitian PSD M x M one-ring covariance of user k, unit diagonal.

    Fixed-node Gauss-Legendre quadrature of the scattering integral.  The
    quadrature form R = A diag(w) A^H is PSD by construction; tiny negative
    eigenvalues from rounding are clipped when the square root is taken.
    """
    if not 0 <= k < cfg.K:
        raise DimensionError(f"user index {k} out of range")
    theta = np.deg2rad(user_angles(cfg)[k])
    delta = np.deg2rad(cfg.delta_deg)
    nodes, weights = np.polynomial.legendre.leggauss(cfg.quadrature_points)
    alpha = theta + delta * nodes  # maps [-1, 1] onto [theta - Delta, theta + Delta]
    w = weights / 2.0  # (delta / 2 Delta) * leggauss weights
    m = np.arange(cfg.M)
    A = np.exp(2j * np.pi * cfg.antenna_spacing * np.outer(m, np.sin(alpha)))
    R = (A * w) @ A.conj().T
    return 0.5 * (R + R.conj().T)


def array_response(cfg: OneRingConfig, theta_deg: float) -> np.ndarray:
    """ULA steering vector at azimuth theta (degrees), unnormalized."""
    m = np.arange(cfg.M)
    return np.exp(2j * np.pi * cfg.antenna_spacing * m * np.sin(np.deg2rad(theta_deg)))


def _sqrt_psd(R: np.ndarray) -> np.ndarray:
    lam, Q = np.linalg.eigh(R)
    lam = np.clip(lam, 0.0, None)  # guard quadrature-induced tiny negatives
    return (Q * np.sqrt(lam)) @ Q.conj().T


def draw_channels(cfg: OneRingConfig, sigma2: float | np.ndarray = 1.0) -> ChannelSet:
    """Draw one seeded channel realization g_k = R_k^{1/2} z_k for all users."""
    rng = np.random.default_rng(cfg.seed)
    G = np.empty((cfg.K, cfg.M), dtype=np.complex128)
    for k in range(cfg.K):
        root = _sqrt_psd(covariance(cfg, k))
        z = (rng.standard_normal(cfg.M) + 1j * rng.standard_normal(cfg.M)) / np.sqrt(2)
        g = root @ z
        G[k] = g.conj()  # row k holds g_k^H
    sig = np.broadcast_to(np.asarray(sigma2, dtype=np.float64), (cfg.K,))
    return ChannelSet(G=G, sigma2=sig.copy())


def trial_seed(master_seed: int, M: int, N: int, K: int, trial: int) -> int:
    """Stable 64-bit seed for one (sweep point, trial) cell.

    Built from a SeedSequence spawn key so adding schemes or reordering sweep
    points never changes which channel a given cell draws.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=(M, N, K, trial))
    return int(ss.generate_state(1, np.uint64)[0])


def dump_channels(path, ch: ChannelSet, cfg: OneRingConfig | None = None) -> None:
    """Write a channel realization as CSV: one row per (user, antenna) entry.

    The first line is a sidecar comment recording the generating config (if
    any) and the noise powers, so fixtures are self-describing.
    """
    meta = {"sigma2": [float(s) for s in ch.sigma2]}
    if cfg is not None:
        meta["config"] = asdict(cfg)
    with open(path, "w") as f:
        f.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        f.write("user,antenna,re,im\n")
        for k in range(ch.K):
            for m in range(ch.M):
                v = ch.G[k, m]
                f.write(f"{k},{m},{v.real!r},{v.imag!r}\n")


def load_channels(path) -> tuple[ChannelSet, dict]:
    """Read a CSV written by dump_channels; returns the ChannelSet and metadata."""
    with open(path) as f:
        first = f.readline()
        if not first.startswith("#"):
            raise DimensionError("missing sidecar config line")
        meta = json.loads(first.lstrip("# ").strip())
        header = f.readline().strip()
        if header != "user,antenna,re,im":
            raise DimensionError(f"unexpected header {header!r}")
        entries = {}
        for line in f:
            if not line.strip():
                continue
            k_s, m_s, re_s, im_s = line.strip().split(",")
            entries[(int(k_s), int(m_s))] = float(re_s) + 1j * float(im_s)
    K = 1 + max(k for k, _ in entries)
    M = 1 + max(m for _, m in entries)
    G = np.zeros((K, M), dtype=np.complex128)
    for (k, m), v in entries.items():
        G[k, m] = v
    sigma2 = np.asarray(meta["sigma2"], dtype=np.float64)
    return ChannelSet(G=G, sigma2=sigma2), meta
