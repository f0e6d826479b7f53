"""Self-contained interior-point solver for the lifted beamforming subproblem.

The problem class: over Hermitian X of size n = M + K,

    minimize   ||B(X)||_F^2 + Re trace(C^H X)
    subject to coef_k * Re(r_k[k]) >= ||(r_k, sigma_k)||_2     (SOC, one per user)
               Re(r_k[k]) >= 0                                 (linear, one per user)
               X PSD,

where B(X) is the top-right M x K block and r_k = g_k^H B(X) is a 1 x K row
read of that block.

Method: the Hermitian variable is embedded into the real symmetric matrix

    T(X) = [[Re X, -Im X], [Im X, Re X]],

which preserves PSD-ness both ways and doubles eigenvalue multiplicities, and
a primal barrier method runs on the embedding: -log det T(X) for the PSD cone
(note det T(X) = det(X)^2, so this is twice the complex log-det), the standard
-log(t^2 - ||u||^2) barrier per second-order cone, -log for each linear
inequality.  Newton steps with backtracking line search follow the central
path while the barrier parameter is reduced geometrically.

Trace bookkeeping of the embedding: trace(T(C)^T T(X)) = 2 Re trace(C^H X).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionError, Infeasible, MaxIters, NumericalFailure

SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# Hermitian <-> real coordinates
# ---------------------------------------------------------------------------

def svec(X: np.ndarray) -> np.ndarray:
    """Isometric real coordinates of a Hermitian matrix.

    Layout [diag(X); sqrt(2) Re X_ij; sqrt(2) Im X_ij] over strict-upper (i, j),
    so that Re trace(A^H B) = svec(A) @ svec(B).
    """
    n = X.shape[0]
    iu, ju = np.triu_indices(n, 1)
    off = X[iu, ju]
    return np.concatenate([X.diagonal().real, SQRT2 * off.real, SQRT2 * off.imag])


def sunvec(y: np.ndarray, n: int) -> np.ndarray:
    """Inverse of svec."""
    P = n * (n - 1) // 2
    if y.shape != (n + 2 * P,):
        raise DimensionError(f"coordinate vector has wrong length for n={n}")
    iu, ju = np.triu_indices(n, 1)
    X = np.zeros((n, n), dtype=np.complex128)
    X[np.arange(n), np.arange(n)] = y[:n]
    off = (y[n : n + P] + 1j * y[n + P :]) / SQRT2
    X[iu, ju] = off
    X[ju, iu] = off.conj()
    return X


def embed_hermitian(X: np.ndarray) -> np.ndarray:
    """Real symmetric 2n x 2n embedding [[Re X, -Im X], [Im X, Re X]]."""
    n = X.shape[0]
    Y = np.empty((2 * n, 2 * n))
    Y[:n, :n] = X.real
    Y[n:, n:] = X.real
    Y[n:, :n] = X.imag
    Y[:n, n:] = -X.imag
    return Y


def extract_hermitian(Y: np.ndarray) -> np.ndarray:
    """Inverse of embed_hermitian on its image."""
    n = Y.shape[0] // 2
    return Y[:n, :n] + 1j * Y[n:, :n]


# ---------------------------------------------------------------------------
# Problem statement
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConicProblem:
    """One X-update instance; see the module docstring for the formulation."""

    M: int
    G: np.ndarray          # K x M row reads (row k is g_k^H)
    sigma: np.ndarray      # K noise standard deviations (constants in the cones)
    soc_coef: np.ndarray   # K scalings sqrt((1 + eta_k) / eta_k)
    C: np.ndarray          # n x n Hermitian linear-objective matrix

    def __post_init__(self):
        G = np.asarray(self.G, dtype=np.complex128)
        K = G.shape[0]
        n = self.M + K
        C = np.asarray(self.C, dtype=np.complex128)
        if C.shape != (n, n):
            raise DimensionError("C must be (M+K) x (M+K)")
        if np.linalg.norm(C - C.conj().T) > 1e-9 * max(1.0, np.linalg.norm(C)):
            raise DimensionError("C must be Hermitian")
        sigma = np.asarray(self.sigma, dtype=np.float64)
        coef = np.asarray(self.soc_coef, dtype=np.float64)
        if sigma.shape != (K,) or coef.shape != (K,):
            raise DimensionError("sigma and soc_coef must have K entries")
        if K and (np.any(sigma <= 0) or np.any(coef <= 0)):
            raise DimensionError("sigma and soc_coef must be positive")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "soc_coef", coef)
        object.__setattr__(self, "C", 0.5 * (C + C.conj().T))

    @property
    def K(self) -> int:
        return self.G.shape[0]

    @property
    def n(self) -> int:
        return self.M + self.K


def coupling_rows(problem: ConicProblem, X: np.ndarray) -> np.ndarray:
    """All row reads at once: entry (k, i) is g_k^H B(X) e_i."""
    return problem.G @ X[: problem.M, problem.M :]


def objective_value(problem: ConicProblem, X: np.ndarray) -> float:
    B = X[: problem.M, problem.M :]
    return float(np.linalg.norm(B) ** 2 + np.real(np.trace(problem.C.conj().T @ X)))


def residuals(problem: ConicProblem, X: np.ndarray) -> dict:
    """Constraint slacks evaluated from X directly (solver-independent)."""
    rows = coupling_rows(problem, X)
    if problem.K:
        t = problem.soc_coef * np.diag(rows).real
        norms = np.sqrt(np.sum(np.abs(rows) ** 2, axis=1) + problem.sigma**2)
        soc = t - norms
        lin = np.diag(rows).real
    else:
        soc = np.zeros(0)
        lin = np.zeros(0)
    eigs = np.linalg.eigvalsh(embed_hermitian(X))
    return {"soc": soc, "lin": lin, "psd_min_eig": float(eigs[0])}


# ---------------------------------------------------------------------------
# Solver configuration and status
# ---------------------------------------------------------------------------

@dataclass
class SolverOptions:
    feas_tol: float = 1e-7
    gap_tol: float = 1e-7
    barrier_reduction: float = 0.2   # barrier parameter 1/t shrinks by this factor
    newton_tol: float = 1e-10        # on the half squared Newton decrement
    max_newton: int = 4000
    max_stage_newton: int = 60
    reg_ladder: tuple = (0.0, 1e-12, 1e-10, 1e-8, 1e-6)
    objective_scale: float = 1.0     # tolerances are absolute at this scale
    trace_reg: float = 1e-9          # bounds the central path when the optimal face is unbounded
    warm_blend: float = 0.9          # warm starts move this fraction from the interior anchor
    initial_gap: float | None = None # override the starting-gap heuristic
    record_merits: bool = False


@dataclass
class SolverStatus:
    status: str                      # optimal | infeasible | max_iters | numerical_failure
    gap: float
    iterations: int
    barrier_path: list = field(default_factory=list)   # (t, gap) per stage
    merit_history: list = field(default_factory=list)  # per-stage accepted merits
    phase1_used: bool = False
    message: str = ""


# ---------------------------------------------------------------------------
# Real embedding of the whole problem
# ---------------------------------------------------------------------------

class EmbeddedConicProblem:
    """Index machinery and constraint functionals over svec coordinates.

    Every SOC and linear functional only touches the coordinates of the
    top-right block, so they are stored over that sub-vector (first M*K
    entries the scaled real parts, then M*K the scaled imaginary parts).
    """

    def __init__(self, problem: ConicProblem):
        self.problem = problem
        n, M, K = problem.n, problem.M, problem.K
        self.n, self.M, self.K = n, M, K
        P = n * (n - 1) // 2
        self.m = n + 2 * P
        iu, ju = np.triu_indices(n, 1)
        self.iu, self.ju = iu, ju
        posmat = np.full((n, n), -1, dtype=np.int64)
        posmat[iu, ju] = np.arange(P)

        # Coordinates of the coupling block: pairs (p, M+i), p-major order.
        pp, ii = np.meshgrid(np.arange(M), np.arange(K), indexing="ij")
        pos_b = posmat[pp.ravel(), (M + ii).ravel()]
        self.b_idx = np.concatenate([n + pos_b, n + P + pos_b])  # re coords, im coords
        self.nb = 2 * M * K

        # SOC data per user over the sub-vector: t = a @ yb, u = (A @ yb, sigma).
        self.soc_a = []
        self.soc_A = []
        self.soc_AtA = []
        self.lin_rows = []
        for k in range(K):
            gre = problem.G[k].real / SQRT2
            gim = problem.G[k].imag / SQRT2
            Are = np.zeros((K, self.nb))
            Aim = np.zeros((K, self.nb))
            for i in range(K):
                cols = np.arange(M) * K + i
                Are[i, cols] = gre
                Are[i, M * K + cols] = -gim
                Aim[i, cols] = gim
                Aim[i, M * K + cols] = gre
            A = np.vstack([Are, Aim])
            self.soc_a.append(problem.soc_coef[k] * Are[k])
            self.soc_A.append(A)
            self.soc_AtA.append(A.T @ A)
            self.lin_rows.append(Are[k].copy())

        self.c_obj = svec(problem.C)
        self.e_identity = svec(np.eye(n, dtype=np.complex128))
        # Barrier complexity: 2n for the embedded log-det, 2 per SOC, 1 per linear.
        self.nu = 2 * n + 3 * K

    # -- coordinate helpers -------------------------------------------------

    def to_coords(self, X: np.ndarray) -> np.ndarray:
        return svec(np.asarray(X, dtype=np.complex128))

    def to_matrix(self, y: np.ndarray) -> np.ndarray:
        return sunvec(y, self.n)

    # -- constraint slack evaluation -----------------------------------------

    def slacks(self, y: np.ndarray, s_aux: float | None = None):
        """Per-cone slacks at y (with the phase-1 relaxation if s_aux given).

        Returns (t, Au, soc_s, lin) where soc_s = t^2 - ||(Au, sigma)||^2.
        """
        yb = y[self.b_idx]
        K = self.K
        t = np.empty(K)
        soc_s = np.empty(K)
        lin = np.empty(K)
        Au = []
        shift = 0.0 if s_aux is None else s_aux
        for k in range(K):
            tk = self.soc_a[k] @ yb + shift
            au = self.soc_A[k] @ yb
            t[k] = tk
            soc_s[k] = tk * tk - (au @ au + self.problem.sigma[k] ** 2)
            lin[k] = self.lin_rows[k] @ yb + shift
            Au.append(au)
        return t, Au, soc_s, lin

    def psd_factor(self, y: np.ndarray, s_aux: float | None = None):
        """Cholesky of the embedded matrix, or None when not strictly PD."""
        X = self.to_matrix(y)
        if s_aux is not None:
            X = X + s_aux * np.eye(self.n)
        Y = embed_hermitian(X)
        try:
            L = scipy.linalg.cholesky(Y, lower=True, check_finite=False)
        except scipy.linalg.LinAlgError:
            return None
        return L

    def strictly_feasible(self, y: np.ndarray, s_aux: float | None = None) -> bool:
        L = self.psd_factor(y, s_aux)
        if L is None:
            return False
        t, _, soc_s, lin = self.slacks(y, s_aux)
        return bool(np.all(t > 0) and np.all(soc_s > 0) and np.all(lin > 0))


def real_embed(problem: ConicProblem) -> EmbeddedConicProblem:
    """Re-express the Hermitian problem over real symmetric embedded coordinates."""
    return EmbeddedConicProblem(problem)


# ---------------------------------------------------------------------------
# Barrier evaluation
# ---------------------------------------------------------------------------

def _svec_rows(out: np.ndarray, Bm: np.ndarray, iu, ju, n: int, P: int) -> None:
    """svec of a batch of Hermitian matrices, written into out (batch x m)."""
    dg = np.arange(n)
    out[:, :n] = Bm[:, dg, dg].real
    off = Bm[:, iu, ju]
    out[:, n : n + P] = SQRT2 * off.real
    out[:, n + P :] = SQRT2 * off.imag


def _psd_hessian(S: np.ndarray, iu, ju) -> np.ndarray:
    """Hessian of -log det T(X) in svec coordinates; equals twice the Gram
    matrix of svec(S E_a S) against the orthonormal Hermitian basis."""
    n = S.shape[0]
    P = iu.size
    m = n + 2 * P
    Sc = S.conj()
    R = np.empty((m, m))
    D = np.einsum("pi,qi->ipq", S, Sc)
    _svec_rows(R[:n], D, iu, ju, n, P)
    T1 = np.einsum("pt,qt->tpq", S[:, iu], Sc[:, ju])
    T2 = np.einsum("pt,qt->tpq", S[:, ju], Sc[:, iu])
    B = T1 + T2
    B *= 1.0 / SQRT2
    _svec_rows(R[n : n + P], B, iu, ju, n, P)
    np.subtract(T1, T2, out=B)
    B *= 1j / SQRT2
    _svec_rows(R[n + P :], B, iu, ju, n, P)
    return R + R.T  # symmetrized 2 * R


class _Objective:
    """Smooth objective pieces: quadratic on the coupling block, linear term,
    and the small trace regularizer that keeps the central path bounded."""

    def __init__(self, emb: EmbeddedConicProblem, opts: SolverOptions, trace_anchor: float,
                 phase1: bool):
        self.emb = emb
        self.phase1 = phase1
        c_tr = opts.trace_reg * opts.objective_scale / max(trace_anchor, 1e-12)
        self.c_lin = c_tr * emb.e_identity.copy()
        if not phase1:
            self.c_lin = self.c_lin + emb.c_obj
        self.c_s = 1.0 if phase1 else 0.0  # phase-1 minimizes the relaxation slack

    def value(self, y, s_aux):
        v = float(self.c_lin @ y) + self.c_s * (s_aux or 0.0)
        if not self.phase1:
            yb = y[self.emb.b_idx]
            v += 0.5 * float(yb @ yb)
        return v

    def raw_value(self, y):
        """Objective without the trace regularizer (the reported value)."""
        yb = y[self.emb.b_idx]
        return 0.5 * float(yb @ yb) + float(self.emb.c_obj @ y)


def _merit(emb: EmbeddedConicProblem, obj: _Objective, y, s_aux, t_bar):
    """t * f + barrier, or +inf when y is not strictly feasible."""
    L = emb.psd_factor(y, s_aux)
    if L is None:
        return np.inf
    t, _, soc_s, lin = emb.slacks(y, s_aux)
    if np.any(t <= 0) or np.any(soc_s <= 0) or np.any(lin <= 0):
        return np.inf
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    phi = -logdet - float(np.sum(np.log(soc_s))) - float(np.sum(np.log(lin)))
    return t_bar * obj.value(y, s_aux) + phi


def _newton_system(emb: EmbeddedConicProblem, obj: _Objective, y, s_aux, t_bar):
    """Gradient and Hessian of the merit at a strictly feasible point."""
    aug = s_aux is not None
    m = emb.m
    mx = m + 1 if aug else m

    L = emb.psd_factor(y, s_aux)
    Yinv = scipy.linalg.cho_solve((L, True), np.eye(2 * emb.n), check_finite=False)
    S = extract_hermitian(Yinv)
    S = 0.5 * (S + S.conj().T)

    g = np.zeros(mx)
    Hd = _psd_hessian(S, emb.iu, emb.ju)
    g_psd = -2.0 * svec(S)
    g[:m] = g_psd
    if aug:
        HeI = Hd @ emb.e_identity
        H = np.zeros((mx, mx))
        H[:m, :m] = Hd
        H[:m, m] = HeI
        H[m, :m] = HeI
        H[m, m] = float(emb.e_identity @ HeI)
        g[m] = float(emb.e_identity @ g_psd)
    else:
        H = Hd

    # Second-order cones and the linear inequalities live on the sub-vector.
    yb = y[emb.b_idx]
    sub_idx = np.concatenate([emb.b_idx, [m]]) if aug else emb.b_idx
    nb = emb.nb + 1 if aug else emb.nb
    Hsub = np.zeros((nb, nb))
    gsub = np.zeros(nb)
    shift = s_aux if aug else 0.0
    for k in range(emb.K):
        a = emb.soc_a[k]
        A = emb.soc_A[k]
        au = A @ yb
        tk = float(a @ yb) + (shift if aug else 0.0)
        sk = tk * tk - (float(au @ au) + emb.problem.sigma[k] ** 2)
        a_ext = np.concatenate([a, [1.0]]) if aug else a
        atu = A.T @ au
        atu_ext = np.concatenate([atu, [0.0]]) if aug else atu
        ds = 2.0 * tk * a_ext - 2.0 * atu_ext
        gsub += -ds / sk
        Hsub += np.outer(ds, ds) / sk**2
        Hsub -= (2.0 / sk) * np.outer(a_ext, a_ext)
        if aug:
            Hsub[: emb.nb, : emb.nb] += (2.0 / sk) * emb.soc_AtA[k]
        else:
            Hsub += (2.0 / sk) * emb.soc_AtA[k]

        lk = float(emb.lin_rows[k] @ yb) + (shift if aug else 0.0)
        l_ext = np.concatenate([emb.lin_rows[k], [1.0]]) if aug else emb.lin_rows[k]
        gsub += -l_ext / lk
        Hsub += np.outer(l_ext, l_ext) / lk**2

    g[sub_idx] += gsub
    H[np.ix_(sub_idx, sub_idx)] += Hsub

    # Objective contribution.
    g[:m] += t_bar * obj.c_lin
    if aug:
        g[m] += t_bar * obj.c_s
    if not obj.phase1:
        g[emb.b_idx] += t_bar * yb
        H[emb.b_idx, emb.b_idx] += t_bar

    return g, H


def _solve_newton(H: np.ndarray, g: np.ndarray, reg_ladder) -> np.ndarray | None:
    scale = float(np.mean(np.diag(H)))
    scale = scale if np.isfinite(scale) and scale > 0 else 1.0
    for reg in reg_ladder:
        try:
            Hr = H if reg == 0.0 else H + reg * scale * np.eye(H.shape[0])
            cf = scipy.linalg.cho_factor(Hr, check_finite=False)
            return scipy.linalg.cho_solve(cf, -g, check_finite=False)
        except scipy.linalg.LinAlgError:
            continue
    return None


def _center(emb, obj, y, s_aux, t_bar, opts, newton_budget, merits_out=None,
            stop_s: float | None = None):
    """Damped Newton iterations at fixed barrier parameter.

    Returns (y, s_aux, steps, converged).  When ``stop_s`` is given (phase-1),
    exits as soon as the relaxation slack drops below it.
    """
    aug = s_aux is not None
    merit = _merit(emb, obj, y, s_aux, t_bar)
    steps = 0
    for _ in range(min(opts.max_stage_newton, max(newton_budget, 1))):
        g, H = _newton_system(emb, obj, y, s_aux, t_bar)
        d = _solve_newton(H, g, opts.reg_ladder)
        if d is None:
            raise NumericalFailure("Newton system not positive definite after "
                                   "the regularization ladder")
        decrement_sq = float(-g @ d)
        if decrement_sq <= 0:
            return y, s_aux, steps, True
        if 0.5 * decrement_sq <= opts.newton_tol * (1.0 + abs(merit)):
            return y, s_aux, steps, True

        alpha = 1.0
        gd = float(g @ d)
        accepted = False
        for _ in range(60):
            y_new = y + alpha * d[: emb.m]
            s_new = (s_aux + alpha * d[emb.m]) if aug else None
            merit_new = _merit(emb, obj, y_new, s_new, t_bar)
            if merit_new < merit + 1e-4 * alpha * gd:
                y, s_aux, merit = y_new, s_new, merit_new
                accepted = True
                break
            alpha *= 0.5
        steps += 1
        if not accepted:
            return y, s_aux, steps, False
        if merits_out is not None:
            merits_out.append(merit)
        if stop_s is not None and s_aux is not None and s_aux < stop_s:
            return y, s_aux, steps, True
    return y, s_aux, steps, False


def _phase1(emb: EmbeddedConicProblem, opts: SolverOptions, scale: float):
    """Search for a strictly feasible point by minimizing a relaxation slack.

    Relaxes every cone by s (SOC: (t+s)^2 >= ||u||^2, linear: l + s >= 0,
    PSD: X + sI PSD) and drives s below zero.  Failure to push s negative
    within tolerance certifies the constraint set as empty.
    """
    n = emb.n
    rho = max(scale, 1.0)
    y = svec(rho * np.eye(n, dtype=np.complex128))
    t0, _, soc_s0, lin0 = emb.slacks(y, 0.0)
    need = 0.0
    for k in range(emb.K):
        u_norm = math.sqrt(max(t0[k] ** 2 - soc_s0[k], 0.0))
        need = max(need, u_norm - t0[k], -lin0[k])
    s_aux = 1.5 * need + 0.1 * rho

    obj = _Objective(emb, opts, trace_anchor=rho * n, phase1=True)
    nu = emb.nu
    margin = 10 * opts.feas_tol * max(1.0, scale)
    t_bar = nu / max(s_aux, 1.0)
    total = 0
    for _ in range(60):
        y, s_aux, steps, _ = _center(emb, obj, y, s_aux, t_bar, opts,
                                     opts.max_newton - total, stop_s=-margin)
        total += steps
        if s_aux < -margin and emb.strictly_feasible(y):
            return y, total
        if nu / t_bar <= opts.feas_tol * max(1.0, scale):
            raise Infeasible("phase-1 could not find a strictly feasible point")
        if total >= opts.max_newton:
            raise MaxIters("phase-1 exhausted its Newton budget")
        t_bar /= opts.barrier_reduction
    raise Infeasible("phase-1 stalled; constraint set appears empty")


def solve(
    problem: ConicProblem,
    warm_start: np.ndarray | None = None,
    opts: SolverOptions | None = None,
    interior_anchor: np.ndarray | None = None,
) -> tuple[np.ndarray, SolverStatus]:
    """Barrier method on the real embedding; returns (X, status).

    ``warm_start`` is blended toward ``interior_anchor`` (a strictly feasible
    point, when the caller has one) before use; with neither available a
    phase-1 relaxation search runs first.  Raises Infeasible, MaxIters or
    NumericalFailure; on normal return status.status == "optimal" and the gap
    field bounds the suboptimality of the reported point.
    """
    opts = opts or SolverOptions()
    emb = real_embed(problem)
    scale = opts.objective_scale
    gap_tol_abs = opts.gap_tol * max(scale, 1e-12)

    status = SolverStatus(status="optimal", gap=np.inf, iterations=0)

    # Starting point: blend -> anchor -> phase-1.
    y = None
    if warm_start is not None:
        yw = emb.to_coords(warm_start)
        if interior_anchor is not None:
            ya = emb.to_coords(interior_anchor)
            yb = opts.warm_blend * yw + (1.0 - opts.warm_blend) * ya
            if emb.strictly_feasible(yb):
                y = yb
            elif emb.strictly_feasible(ya):
                y = ya
        elif emb.strictly_feasible(yw):
            y = yw
    if y is None and interior_anchor is not None:
        ya = emb.to_coords(interior_anchor)
        if emb.strictly_feasible(ya):
            y = ya
    warm = y is not None and warm_start is not None
    if y is None:
        y, used = _phase1(emb, opts, scale)
        status.phase1_used = True
        status.iterations += used

    trace_anchor = float(np.real(np.trace(emb.to_matrix(y))))
    obj = _Objective(emb, opts, trace_anchor=trace_anchor, phase1=False)

    f0 = obj.value(y, None)
    nu = emb.nu
    if opts.initial_gap is not None:
        gap0 = max(opts.initial_gap, 10.0 * gap_tol_abs)
    elif warm:
        gap0 = max(0.02 * max(abs(f0), scale), 100.0 * gap_tol_abs)
    else:
        gap0 = max(0.5 * max(abs(f0), scale), 100.0 * gap_tol_abs)
    t_bar = nu / gap0
    t_final = nu / (0.8 * gap_tol_abs)

    while True:
        merits = [] if opts.record_merits else None
        y, _, steps, _ = _center(emb, obj, y, None, t_bar, opts,
                                 opts.max_newton - status.iterations, merits)
        status.iterations += steps
        gap = nu / t_bar
        status.barrier_path.append((t_bar, gap))
        if opts.record_merits:
            status.merit_history.append(np.asarray(merits))
        if gap <= gap_tol_abs:
            status.gap = gap
            break
        if status.iterations >= opts.max_newton:
            raise MaxIters(f"gap {gap:.3e} > {gap_tol_abs:.3e} after "
                           f"{status.iterations} Newton steps")
        t_bar = min(t_bar / opts.barrier_reduction, t_final)

    X = emb.to_matrix(y)
    X = 0.5 * (X + X.conj().T)
    res = residuals(problem, X)
    feas_floor = -opts.feas_tol * max(1.0, scale)
    if (res["psd_min_eig"] < feas_floor
            or (problem.K and (np.min(res["soc"]) < feas_floor
                               or np.min(res["lin"]) < feas_floor))):
        raise NumericalFailure("returned point violates feasibility tolerances")
    return X, status
