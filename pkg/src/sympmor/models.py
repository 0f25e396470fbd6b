"""Hamiltonian PDE testbeds: 1D linear wave and 1D sine-Gordon.

Wave equation u_tt = mu^2 u_xx on Omega = [-1/2, 1/2] with homogeneous
Dirichlet boundary values, discretized on N+2 grid points (full dimension
2(N+2)); the system stays in its unscaled form with the 1/h factor folded
into the vector field.

Sine-Gordon u_tt = u_xx - sin(u) on [a, b] with N interior points (full
dimension 2N) and two boundary/initial families (single soliton, soliton-
soliton doublets), both with closed-form solutions.
"""

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionError
from .integrators import OdeSystem


# -- linear wave ------------------------------------------------------------

@dataclass
class WaveModel:
    N: int
    mu: float
    h: float
    K_mat: np.ndarray      # (N+2) x (N+2)
    xi: np.ndarray         # grid points including boundaries

    @property
    def dim(self):
        return 2 * (self.N + 2)


def wave_build(N, mu, a=-0.5, b=0.5):
    """Assemble the discrete wave model on [a, b] = [-1/2, 1/2]."""
    if N < 1 or mu <= 0:
        raise DimensionError("need N >= 1 and mu > 0")
    h = (b - a) / (N + 1)
    m = N + 2
    K = np.zeros((m, m))
    diag = np.full(m, 0.75)
    diag[0] = diag[-1] = 0.25
    np.fill_diagonal(K, diag)
    for i in range(m - 1):
        # off-diagonals are -1/2 except in the first and last rows
        if i not in (0,):
            K[i, i + 1] = -0.5
        if i + 1 != m - 1:
            K[i + 1, i] = -0.5
    K[0, 1] = 0.0
    K[m - 1, m - 2] = 0.0
    K *= mu ** 2 / h
    xi = np.linspace(a, b, m)
    return WaveModel(N=N, mu=mu, h=h, K_mat=K, xi=xi)


def wave_vector_field(model):
    m = model.N + 2
    S = -(model.K_mat + model.K_mat.T) / model.h

    def field(t, x):
        if len(x) != 2 * m:
            raise DimensionError(f"state must have length {2 * m}")
        q, p = x[:m], x[m:]
        return np.concatenate([p, S @ q])

    return field


def wave_linear_matrix(model):
    """Dense A with field(x) = A x; enables the cached-factorization fast path."""
    m = model.N + 2
    A = np.zeros((2 * m, 2 * m))
    A[:m, m:] = np.eye(m)
    A[m:, :m] = -(model.K_mat + model.K_mat.T) / model.h
    return A


def wave_hamiltonian(model):
    m = model.N + 2

    def H(x):
        q, p = x[:m], x[m:]
        return float(q @ model.K_mat @ q + 0.5 * model.h * (p @ p))

    return H


def _bump(s):
    """Piecewise cubic h(s): 1 - 3s^2/2 + 3s^3/4 on [0,1], (2-s)^3/4 on (1,2], else 0."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m1 = (s >= 0) & (s <= 1)
    m2 = (s > 1) & (s <= 2)
    out[m1] = 1.0 - 1.5 * s[m1] ** 2 + 0.75 * s[m1] ** 3
    out[m2] = 0.25 * (2.0 - s[m2]) ** 3
    return out


def _bump_prime(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m1 = (s >= 0) & (s <= 1)
    m2 = (s > 1) & (s <= 2)
    out[m1] = -3.0 * s[m1] + 2.25 * s[m1] ** 2
    out[m2] = -0.75 * (2.0 - s[m2]) ** 2
    return out


def wave_initial(N, mu, a=-0.5, b=0.5):
    """Initial state [q0; p0]: q0 a cubic bump at the left edge, p0 = -mu d_xi q0."""
    model = wave_build(N, mu, a, b)
    xi = model.xi
    s = 28.0 * np.abs(xi + 0.5)
    q0 = _bump(s)
    sgn = np.sign(xi + 0.5)  # sign(0) = 0; harmless since h'(0) = 0
    p0 = -mu * _bump_prime(s) * 28.0 * sgn
    return np.concatenate([q0, p0])


def wave_system(model):
    return OdeSystem(
        dim=model.dim,
        vector_field=wave_vector_field(model),
        hamiltonian=wave_hamiltonian(model),
        linear_matrix=wave_linear_matrix(model),
    )


# -- sine-Gordon ------------------------------------------------------------

class SgKind(enum.Enum):
    SingleSoliton = "single_soliton"
    Doublets = "doublets"


@dataclass
class SineGordonModel:
    N: int
    nu: float
    a: float
    b: float
    h: float
    L_mat: np.ndarray
    bc: SgKind

    @property
    def dim(self):
        return 2 * self.N

    @property
    def xi(self):
        """Interior grid points."""
        return self.a + self.h * np.arange(1, self.N + 1)


def sg_build(N, nu, a, b, bc):
    if abs(nu) >= 1:
        raise DimensionError("need |nu| < 1")
    if N < 1 or b <= a:
        raise DimensionError("need N >= 1 and b > a")
    h = (b - a) / (N + 1)
    L = np.zeros((N, N))
    np.fill_diagonal(L, -2.0)
    idx = np.arange(N - 1)
    L[idx, idx + 1] = 1.0
    L[idx + 1, idx] = 1.0
    L /= h ** 2
    return SineGordonModel(N=N, nu=nu, a=a, b=b, h=h, L_mat=L, bc=bc)


def sg_exact(bc, nu, t, xi):
    """Closed-form solution (u, u_t) of the sine-Gordon equation."""
    if abs(nu) >= 1:
        raise DimensionError("need |nu| < 1")
    xi = np.asarray(xi, dtype=float)
    root = np.sqrt(1.0 - nu ** 2)
    if bc is SgKind.SingleSoliton:
        z = (xi - nu * t) / root
        u = 4.0 * np.arctan(np.exp(z))
        u_t = -4.0 * nu * np.exp(z) / (root * (1.0 + np.exp(2.0 * z)))
        return u, u_t
    arg = nu * t / root
    g = nu / np.cosh(arg)
    gp = -(nu ** 2 / root) * np.tanh(arg) / np.cosh(arg)
    s = np.sinh(xi / root)
    u = 4.0 * np.arctan(g * s)
    u_t = 4.0 * s * gp / (1.0 + (g * s) ** 2)
    return u, u_t


def sg_boundary_fns(model):
    """phi(t) = u(t, a), psi(t) = u(t, b) from the exact solution."""

    def phi(t):
        return float(sg_exact(model.bc, model.nu, t, np.array([model.a]))[0][0])

    def psi(t):
        return float(sg_exact(model.bc, model.nu, t, np.array([model.b]))[0][0])

    return phi, psi


def sg_vector_field(model):
    phi, psi = sg_boundary_fns(model)
    L = model.L_mat
    h2 = model.h ** 2

    def field(t, x):
        if len(x) != model.dim:
            raise DimensionError(f"state must have length {model.dim}")
        q, p = x[:model.N], x[model.N:]
        f = np.sin(q)
        f[0] -= phi(t) / h2
        f[-1] -= psi(t) / h2
        return np.concatenate([p, L @ q - f])

    return field


def sg_jacobian(model):
    L = model.L_mat

    def jac(t, x):
        q = x[:model.N]
        J = np.zeros((model.dim, model.dim))
        J[:model.N, model.N:] = np.eye(model.N)
        J[model.N:, :model.N] = L - np.diag(np.cos(q))
        return J

    return jac


def sg_hamiltonian(model):
    """Discrete sine-Gordon Hamiltonian including the boundary contributions."""
    phi_f, psi_f = sg_boundary_fns(model)
    h, L = model.h, model.L_mat

    def phi_t(t, eps=1e-6):
        return (phi_f(t + eps) - phi_f(t - eps)) / (2 * eps)

    def psi_t(t, eps=1e-6):
        return (psi_f(t + eps) - psi_f(t - eps)) / (2 * eps)

    def H(x, t=0.0):
        q, p = x[:model.N], x[model.N:]
        phi, psi = phi_f(t), psi_f(t)
        val = -0.5 * h * (q @ L @ q) + 0.5 * h * (p @ p)
        val += 0.5 * h * ((-2 * q[0] * phi + phi ** 2 - 2 * q[-1] * psi + psi ** 2) / h ** 2)
        val += 0.25 * h * (phi_t(t) ** 2 + psi_t(t) ** 2)
        val += 0.5 * h * ((1 - np.cos(phi)) + (1 - np.cos(psi)))
        val += h * np.sum(1 - np.cos(q))
        return float(val)

    return H


def sg_initial(model):
    """Initial state sampled from the exact solution at t = 0."""
    u, u_t = sg_exact(model.bc, model.nu, 0.0, model.xi)
    return np.concatenate([u, u_t])


def sg_system(model):
    return OdeSystem(
        dim=model.dim,
        vector_field=sg_vector_field(model),
        hamiltonian=sg_hamiltonian(model),
        jacobian=sg_jacobian(model),
    )


def sg_residual_check(bc, nu, t_grid, xi_grid):
    """Max finite-difference residual of u_tt - u_xx + sin(u) for the exact solution.

    Used as a test oracle; the residual is O(tau^2 + h^2) for the interior of
    the grids.
    """
    U = np.empty((len(t_grid), len(xi_grid)))
    for i, t in enumerate(t_grid):
        U[i] = sg_exact(bc, nu, t, xi_grid)[0]
    tau = t_grid[1] - t_grid[0]
    h = xi_grid[1] - xi_grid[0]
    utt = (U[2:, 1:-1] - 2 * U[1:-1, 1:-1] + U[:-2, 1:-1]) / tau ** 2
    uxx = (U[1:-1, 2:] - 2 * U[1:-1, 1:-1] + U[1:-1, :-2]) / h ** 2
    res = utt - uxx + np.sin(U[1:-1, 1:-1])
    return float(np.max(np.abs(res)))
