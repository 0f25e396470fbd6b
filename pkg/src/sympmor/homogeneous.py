"""Homogeneous-space machinery for St(n, N) under the O(N) action.

The manifold is a homogeneous space: any point is lambda E with E = [I_n; 0]
and lambda in O(N).  A section lambda_E(X) = [X, lambda_bar] maps a point into
the group; tangent vectors lift to the fixed horizontal space g^{hor,E} of
skew N x N matrices [[W, -C^T], [C, 0]], stored compactly as the (W, C)
blocks.  Retraction back to the manifold goes through the Cayley transform of
the horizontal element, evaluated with the same SMW trick used on the
manifold directly.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, SectionDegenerateError
from .stiefel import StiefelPoint, TangentVector, _smw_core, skew


@dataclass(frozen=True)
class OrthoSection:
    """Orthogonal completion [X | lambda_bar] of a Stiefel point X."""

    base: StiefelPoint
    complement: np.ndarray  # N x (N - n)


class HorizontalElement:
    """Compact storage of [[W, -C^T], [C, 0]] in g^{hor,E}.

    W (n x n, skew) and C ((N-n) x n) hold all independent entries; the dense
    N x N form is never materialized in production paths.
    """

    __slots__ = ("skew_block", "comp_block")

    def __init__(self, skew_block, comp_block):
        self.skew_block = np.asarray(skew_block, dtype=np.float64)
        self.comp_block = np.asarray(comp_block, dtype=np.float64)

    @classmethod
    def zeros_like(cls, other):
        return cls(np.zeros_like(other.skew_block), np.zeros_like(other.comp_block))

    def reskewed(self):
        """Force exact skewness of the W block (storage hygiene for moment caches)."""
        return HorizontalElement(skew(self.skew_block), self.comp_block)

    def dense(self):
        """Test-only dense N x N form."""
        n = self.skew_block.shape[0]
        N = n + self.comp_block.shape[0]
        M = np.zeros((N, N))
        M[:n, :n] = self.skew_block
        M[n:, :n] = self.comp_block
        M[:n, n:] = -self.comp_block.T
        return M


def horizontal_pointwise(a, b=None, op="mul", s=None, delta=None):
    """Pointwise operation on the stored blocks of horizontal elements.

    op: 'mul' (Hadamard with b), 'add' (a + b), 'scale' (s * a),
    'sqrt_add_delta' (elementwise sqrt(a + delta)), 'div' (a / b elementwise).
    Results are shape-compatible storage, not necessarily horizontal.
    """
    if op == "mul":
        return HorizontalElement(a.skew_block * b.skew_block, a.comp_block * b.comp_block)
    if op == "add":
        return HorizontalElement(a.skew_block + b.skew_block, a.comp_block + b.comp_block)
    if op == "scale":
        return HorizontalElement(s * a.skew_block, s * a.comp_block)
    if op == "sqrt_add_delta":
        return HorizontalElement(
            np.sqrt(a.skew_block + delta), np.sqrt(a.comp_block + delta)
        )
    if op == "div":
        return HorizontalElement(a.skew_block / b.skew_block, a.comp_block / b.comp_block)
    raise DimensionError(f"unknown pointwise op {op!r}")


def section_qr(X, seed):
    """Orthogonal extension lambda_bar of X from a seeded random sample.

    Draws A in R^{N x (N-n)} (standard normal), deflates against span(X) and
    orthonormalizes by thin QR.  Deterministic for a fixed seed.
    """
    N, n = X.shape
    if N <= n:
        raise DimensionError("section requires N > n")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((N, N - n))
    A -= X.data @ (X.data.T @ A)
    Q, R = np.linalg.qr(A)
    d = np.abs(np.diag(R))
    if np.any(d < 1e-12 * max(1.0, d.max())):
        raise SectionDegenerateError(
            "rank-deficient sample in section construction; retry with a new seed"
        )
    return OrthoSection(base=X, complement=Q)


def lift_omega(X, Z):
    """Dense lift Omega_X(Z) = (I - XX^T/2) Z X^T - X Z^T (I - XX^T/2); test-only path."""
    Z.require_anchor(X)
    A, B = X.data, Z.data
    half = B - 0.5 * A @ (A.T @ B)
    M = half @ A.T
    return M - M.T


def lift_to_global(section, Z):
    """Block form of lambda^{-1} Omega_X(Z) lambda: W = X^T Z, C = lambda_bar^T Z."""
    Z.require_anchor(section.base)
    return HorizontalElement(
        section.base.data.T @ Z.data, section.complement.T @ Z.data
    )


def retract_global(section, V):
    """Retract lambda_E(X) cay(M/2) E for the horizontal element V (M its dense form).

    Uses the factorization M = U' V' with U' = [[W, -I], [C, 0]],
    V' = [[I, 0], [0, C^T]] and the SMW right-multiplication identity; the
    only dense solve is 2n x 2n and no N x N matrix appears.
    """
    X = section.base
    N, n = X.shape
    W, C = V.skew_block, V.comp_block

    Up = np.zeros((N, 2 * n))
    Up[:n, :n] = W
    Up[n:, :n] = C
    Up[:n, n:] = -np.eye(n)
    Vp = np.zeros((2 * n, N))
    Vp[:n, :n] = np.eye(n)
    Vp[n:, n:] = C.T

    lu, piv = _smw_core(Up, Vp)
    # E = [I_n; 0] so V' E = [I_n; 0] (2n x n)
    VpE = np.zeros((2 * n, n))
    VpE[:n] = np.eye(n)
    rhs = VpE + 0.5 * (Vp @ Up) @ VpE
    coeff = scipy.linalg.lu_solve((lu, piv), rhs)
    # cay(M/2) E = E + U'(V'E)/2 + U' (I - V'U'/2)^{-1} (V'E + V'U'(V'E)/2) / 2
    out = np.zeros((N, n))
    out[:n] = np.eye(n)
    out += 0.5 * Up @ VpE + 0.5 * Up @ coeff
    # left-multiply by lambda = [X | lambda_bar] without assembling it
    full = X.data @ out[:n] + section.complement @ out[n:]
    return StiefelPoint(full)
