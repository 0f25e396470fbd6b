"""FOM -> ROM pipeline: PSD cotangent lift, ROM assembly, error metrics.

The reduced system evolves xi' = J_{2n} grad H_r(xi) with
H_r = H(x_ref + d(xi)); for a symplectic decoder this is evaluated through
the Poisson-shaped product -J_{2n} (Dd)^T J_{2d} f without ever multiplying
by a full J matrix.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError, SympmorError
from .integrators import OdeSystem, Trajectory, implicit_midpoint
from .stiefel import StiefelPoint


@dataclass
class SnapshotSet:
    data: np.ndarray            # 2d x (n_params * (K+1))
    params: list
    K: int
    t0: float
    t1: float
    normalized: bool = False
    initial_states: Optional[np.ndarray] = None  # 2d x n_params

    def __post_init__(self):
        if self.data.shape[1] != len(self.params) * (self.K + 1):
            raise DimensionError("column count must equal n_params * (K+1)")

    def block(self, j):
        """Columns belonging to parameter j."""
        w = self.K + 1
        return self.data[:, j * w:(j + 1) * w]


def normalize_snapshots(raw):
    """Subtract each parameter's initial state from its block of columns."""
    if raw.normalized:
        raise SympmorError("snapshot set is already normalized")
    w = raw.K + 1
    data = raw.data.copy()
    inits = np.empty((raw.data.shape[0], len(raw.params)))
    for j in range(len(raw.params)):
        x0 = raw.data[:, j * w].copy()
        inits[:, j] = x0
        data[:, j * w:(j + 1) * w] -= x0[:, None]
    return SnapshotSet(data=data, params=list(raw.params), K=raw.K, t0=raw.t0,
                       t1=raw.t1, normalized=True, initial_states=inits)


def denormalize_snapshots(norm):
    if not norm.normalized:
        raise SympmorError("snapshot set is not normalized")
    w = norm.K + 1
    data = norm.data.copy()
    for j in range(len(norm.params)):
        data[:, j * w:(j + 1) * w] += norm.initial_states[:, j][:, None]
    return SnapshotSet(data=data, params=list(norm.params), K=norm.K, t0=norm.t0,
                       t1=norm.t1, normalized=False, initial_states=None)


def _jacobi_svd_left(A, max_sweeps=60, tol=1e-13):
    """Left singular vectors and singular values of A (d x m) by one-sided Jacobi.

    Jacobi rotations orthogonalize the d columns of A^T while the same
    rotations accumulate in R; at convergence A = R Sigma Q^T, so the columns
    of R are the left singular vectors and the rotated column norms the
    singular values.  Deterministic, no external decomposition routine, and R
    is orthogonal by construction even for rank-deficient input.
    """
    B = np.array(A.T, dtype=float)   # m x d, rotate its d columns
    d = B.shape[1]
    R = np.eye(d)
    for _ in range(max_sweeps):
        rotated = False
        for i in range(d - 1):
            for j in range(i + 1, d):
                g = B[:, i] @ B[:, j]
                if abs(g) < 1e-300:
                    continue
                ni = B[:, i] @ B[:, i]
                nj = B[:, j] @ B[:, j]
                if abs(g) <= tol * np.sqrt(ni * nj):
                    continue
                rotated = True
                tau = (nj - ni) / (2.0 * g)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = np.sign(tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = c * t
                bi, bj = B[:, i].copy(), B[:, j]
                B[:, i], B[:, j] = c * bi - s * bj, s * bi + c * bj
                ri, rj = R[:, i].copy(), R[:, j]
                R[:, i], R[:, j] = c * ri - s * rj, s * ri + c * rj
        if not rotated:
            break
    sigma = np.linalg.norm(B, axis=0)
    order = np.argsort(-sigma, kind="stable")
    return R[:, order], sigma[order]


def psd_cotangent_lift(M, n):
    """Cotangent-lift basis X (d x n) from the snapshot matrix M (2d x k).

    Rearranges M = [M1; M2] into [M1, M2] (d x 2k) and takes the first n left
    singular vectors; sign convention makes the first nonzero entry of each
    column positive.
    """
    if M.shape[0] % 2:
        raise DimensionError("snapshot matrix must have an even row count")
    d = M.shape[0] // 2
    R = np.hstack([M[:d], M[d:]])
    if n > min(d, R.shape[1]):
        raise DimensionError("n exceeds min(d, 2k)")
    U, sigma = _jacobi_svd_left(R)
    if sigma[0] > 0 and sigma[n - 1] < 1e-12 * sigma[0]:
        warnings.warn("PSD basis includes directions below numerical rank", RuntimeWarning)
    X = U[:, :n].copy()
    for j in range(n):
        col = X[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-13 * max(1.0, np.abs(col).max()))
        if len(nz) and col[nz[0]] < 0:
            X[:, j] = -col
    return StiefelPoint(X)


def psd_maps(X):
    """encode/decode/jacobian closures for the linear PSD pair A, A^+."""
    A = X.data
    d, n = A.shape

    def encode(x):
        if x.ndim == 1:
            return np.concatenate([A.T @ x[:d], A.T @ x[d:]])
        return np.vstack([A.T @ x[:d], A.T @ x[d:]])

    def decode(xr):
        if xr.ndim == 1:
            return np.concatenate([A @ xr[:n], A @ xr[n:]])
        return np.vstack([A @ xr[:n], A @ xr[n:]])

    J = np.zeros((2 * d, 2 * n))
    J[:d, :n] = A
    J[d:, n:] = A

    def jacobian(xr):
        return J

    return encode, decode, jacobian


@dataclass
class RomSpec:
    encode: Callable
    decode: Callable
    decode_jacobian: Callable
    x_r0: np.ndarray
    reduced_dim: int
    x_ref: Optional[np.ndarray] = None

    def reconstruct_state(self, xr):
        out = self.decode(xr)
        if self.x_ref is not None:
            out = out + (self.x_ref if out.ndim == 1 else self.x_ref[:, None])
        return out


def build_rom(encode, decode, decode_jacobian, x0, use_ref, normalized):
    """Bind the ROM initial value and optional reference state.

    Normalized training (which implies a reference state): x_r0 = e(0) and
    x_ref = x0 - d(x_r0), so the initial value reconstructs exactly.
    Unnormalized: x_r0 = e(x0), no reference state.
    """
    x0 = np.asarray(x0, dtype=float)
    if normalized and not use_ref:
        raise SympmorError("normalized data requires the reference-state ROM")
    if use_ref:
        x_r0 = encode(np.zeros_like(x0))
        x_ref = x0 - decode(x_r0)
    else:
        x_r0 = encode(x0)
        x_ref = None
    return RomSpec(encode=encode, decode=decode, decode_jacobian=decode_jacobian,
                   x_r0=x_r0, reduced_dim=len(x_r0), x_ref=x_ref)


def reduced_vector_field(rom, fom_field, fom_dim):
    """xi' = -J_{2n} (Dd)^T J_{2d} f(x_ref + d(xi)), evaluated without J products."""
    d = fom_dim // 2
    n = rom.reduced_dim // 2

    def field(t, xi):
        if len(xi) != 2 * n:
            raise DimensionError(f"reduced state must have length {2 * n}")
        x_full = rom.reconstruct_state(xi)
        f = fom_field(t, x_full)
        Del = rom.decode_jacobian(xi).T        # 2n x 2d
        rhs = np.concatenate([f[d:], -f[:d]])  # J_{2d} f
        rows = np.vstack([-Del[n:], Del[:n]])  # -J_{2n} Del
        return rows @ rhs

    return field


def solve_rom(rom, fom_sys, t0, t1, K, tol=1e-12):
    field = reduced_vector_field(rom, fom_sys.vector_field, fom_sys.dim)
    reduced_sys = OdeSystem(dim=rom.reduced_dim, vector_field=field)
    return implicit_midpoint(reduced_sys, rom.x_r0, t0, t1, K, tol=tol)


def reconstruct(rom, reduced_traj):
    states = rom.reconstruct_state(reduced_traj.states)
    return Trajectory(states=states, t0=reduced_traj.t0, t1=reduced_traj.t1,
                      K=reduced_traj.K)


def reduction_error(variant, exact, rom, reduced):
    """Normalized trajectory error of the reconstructed ROM solution.

    variant 'no_ref' compares d(x_r^k) to x^k; 'with_ref' adds x_ref first.
    """
    if exact.K != reduced.K:
        raise DimensionError("trajectories must share K")
    recon = rom.decode(reduced.states)
    if variant == "with_ref":
        if rom.x_ref is None:
            raise SympmorError("ROM has no reference state")
        recon = recon + rom.x_ref[:, None]
    elif variant != "no_ref":
        raise SympmorError(f"unknown variant {variant!r}")
    denom = np.sum(exact.states ** 2)
    if denom == 0:
        raise SympmorError("zero-norm exact trajectory")
    return float(np.sqrt(np.sum((recon - exact.states) ** 2) / denom))


def projection_error(variant, exact, encode, decode, x_ref=None):
    """Normalized error of d(e(.)) applied to the exact snapshots."""
    X = exact.states
    if variant == "no_ref":
        recon = decode(encode(X))
    elif variant == "with_ref":
        if x_ref is None:
            raise SympmorError("with_ref projection error needs x_ref")
        recon = x_ref[:, None] + decode(encode(X - x_ref[:, None]))
    else:
        raise SympmorError(f"unknown variant {variant!r}")
    denom = np.sum(X ** 2)
    if denom == 0:
        raise SympmorError("zero-norm exact trajectory")
    return float(np.sqrt(np.sum((recon - X) ** 2) / denom))


def symplectic_residual_projection(rom, fom_field, reduced_traj):
    """Max over steps of the symplectically projected residual of the
    reconstructed trajectory, using midpoint-consistent finite differences."""
    n = rom.reduced_dim // 2
    states = reduced_traj.states
    h = (reduced_traj.t1 - reduced_traj.t0) / reduced_traj.K
    times = reduced_traj.times
    worst = 0.0
    for k in range(reduced_traj.K):
        xr_mid = 0.5 * (states[:, k] + states[:, k + 1])
        x_full = rom.reconstruct_state(xr_mid)
        t_mid = 0.5 * (times[k] + times[k + 1])
        f = fom_field(t_mid, x_full)
        D = rom.decode_jacobian(xr_mid)
        d = D.shape[0] // 2
        # residual of the reconstructed trajectory in the full space
        xdot = D @ ((states[:, k + 1] - states[:, k]) / h)
        r = xdot - f
        # (Dd)^+ r = J_{2n} D^T J_{2d}^T r
        DtJr = D.T @ np.concatenate([-r[d:], r[:d]])   # D^T J^T r
        proj = np.concatenate([DtJr[n:], -DtJr[:n]])   # J_{2n} (...)
        worst = max(worst, float(np.linalg.norm(proj)))
    return worst
