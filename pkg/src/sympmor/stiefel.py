"""Geometry of the compact Stiefel manifold St(n, N).

St(n, N) is the set of N x n real matrices with orthonormal columns.  The
tangent space at X consists of all Z with X^T Z + Z^T X = 0.  This module
provides the tangent projection, Riemannian gradients for the Euclidean and
canonical metrics, the Cayley retraction in its factored SMW form, and the
two vector transports associated with it.  No operation materializes an
N x N matrix; everything is O(N n^2).
"""

import enum
import warnings

import numpy as np
import scipy.linalg

from .errors import AnchorMismatchError, DimensionError, RetractionSingularError

ORTHO_TOL_FACTOR = 1e-10   # orthonormality residual bound is ORTHO_TOL_FACTOR * sqrt(n)
REORTH_THRESHOLD = 1e-8    # drift beyond this triggers an explicit thin-QR fix
COND_LIMIT = 1e14          # SMW 2n x 2n system condition estimate limit


class MetricKind(enum.Enum):
    Euclidean = "euclidean"
    Canonical = "canonical"


class TransportKind(enum.Enum):
    Submanifold = "submanifold"
    Differential = "differential"


def skew(M):
    """Skew-symmetric part (M - M^T)/2."""
    return (M - M.T) / 2.0


class StiefelPoint:
    """A point on St(n, N): an N x n matrix with orthonormal columns."""

    __slots__ = ("data", "n_rows", "n_cols")

    def __init__(self, data):
        data = np.ascontiguousarray(np.asarray(data, dtype=np.float64).T).T
        if data.ndim != 2:
            raise DimensionError("StiefelPoint expects a matrix")
        N, n = data.shape
        if N < n or n < 1:
            raise DimensionError(f"need N >= n >= 1, got ({N}, {n})")
        res = np.linalg.norm(data.T @ data - np.eye(n))
        if res > REORTH_THRESHOLD:
            raise DimensionError(
                f"matrix is not orthonormal: residual {res:.3e} exceeds {REORTH_THRESHOLD:.0e}"
            )
        self.data = data
        self.n_rows = N
        self.n_cols = n

    @property
    def shape(self):
        return self.data.shape

    def ortho_residual(self):
        n = self.n_cols
        return np.linalg.norm(self.data.T @ self.data - np.eye(n))

    def renormalized(self):
        """Return self, or a thin-QR re-orthonormalized copy if drift exceeds 1e-8.

        Re-orthonormalization is never silent; a warning is emitted.
        """
        res = self.ortho_residual()
        if res <= REORTH_THRESHOLD:
            return self
        warnings.warn(
            f"Stiefel iterate drifted off the manifold (residual {res:.3e}); re-orthonormalizing",
            RuntimeWarning,
        )
        Q, R = np.linalg.qr(self.data)
        # fix QR sign ambiguity so the result stays close to the input
        signs = np.sign(np.diag(R))
        signs[signs == 0] = 1.0
        return StiefelPoint(Q * signs)

    def _checksum(self):
        return hash(self.data.tobytes())

    def same_point(self, other):
        return (
            self.shape == other.shape
            and self._checksum() == other._checksum()
            and np.array_equal(self.data, other.data)
        )

    def __repr__(self):
        return f"StiefelPoint(N={self.n_rows}, n={self.n_cols})"


class TangentVector:
    """An N x n matrix Z anchored at X with X^T Z + Z^T X = 0."""

    __slots__ = ("data", "anchor")

    def __init__(self, data, anchor, check=True):
        data = np.asarray(data, dtype=np.float64)
        if data.shape != anchor.shape:
            raise DimensionError(
                f"tangent data shape {data.shape} does not match anchor {anchor.shape}"
            )
        if check:
            X = anchor.data
            res = np.linalg.norm(X.T @ data + data.T @ X)
            if res > 1e-9 * np.sqrt(anchor.n_cols) * max(1.0, np.linalg.norm(data)):
                raise DimensionError(f"matrix is not tangent at the anchor (residual {res:.3e})")
        self.data = data
        # anchor stored by value; mismatches are caught exactly via checksum
        self.anchor = anchor

    def require_anchor(self, X):
        if not self.anchor.same_point(X):
            raise AnchorMismatchError("tangent vector anchored at a different point")

    def __repr__(self):
        return f"TangentVector(N={self.anchor.n_rows}, n={self.anchor.n_cols})"


def random_stiefel(N, n, seed):
    """Orthonormal factor of the thin QR of a seeded N x n standard normal sample."""
    if N < n:
        raise DimensionError(f"need N >= n, got ({N}, {n})")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((N, n))
    Q, R = np.linalg.qr(A)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return StiefelPoint(Q * signs)


def project_tangent(X, Y):
    """Orthogonal projection P_X(Y) = (I - XX^T)Y + X skew(X^T Y) onto T_X St(n,N)."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape != X.shape:
        raise DimensionError(f"shape mismatch: {Y.shape} vs {X.shape}")
    A = X.data
    AtY = A.T @ Y
    Z = Y - A @ AtY + A @ skew(AtY)
    return TangentVector(Z, X, check=False)


def riemannian_gradient(metric, X, egrad):
    """Riemannian gradient of f at X from the Euclidean gradient.

    Euclidean metric: egrad - X sym(X^T egrad)  (i.e. the tangent projection).
    Canonical metric: egrad - X egrad^T X.
    """
    egrad = np.asarray(egrad, dtype=np.float64)
    if egrad.shape != X.shape:
        raise DimensionError(f"shape mismatch: {egrad.shape} vs {X.shape}")
    A = X.data
    if metric is MetricKind.Euclidean:
        Z = egrad - A @ ((A.T @ egrad + egrad.T @ A) / 2.0)
    elif metric is MetricKind.Canonical:
        Z = egrad - A @ (egrad.T @ A)
    else:
        raise DimensionError(f"unknown metric {metric!r}")
    return TangentVector(Z, X, check=False)


def metric_inner(metric, X, Z1, Z2):
    """Inner product of two tangent vectors at X for the chosen metric."""
    Z1.require_anchor(X)
    Z2.require_anchor(X)
    A, B1, B2 = X.data, Z1.data, Z2.data
    full = float(np.tensordot(B1, B2))
    if metric is MetricKind.Euclidean:
        return full
    # canonical: trace(Z1^T (I - XX^T/2) Z2)
    return full - 0.5 * float(np.tensordot(A.T @ B1, A.T @ B2))


def cayley_factors(X, Z):
    """Low-rank factors U (N x 2n), V (2n x N) with U V = A_{X,Z}.

    A_{X,Z} = (I - XX^T/2) Z X^T - X Z^T (I - XX^T/2) is the skew N x N matrix
    generating the Cayley retraction; it is never formed densely here.
    """
    Z.require_anchor(X)
    A, B = X.data, Z.data
    AtB = A.T @ B
    left = B - 0.5 * A @ (AtB - AtB.T)
    U = np.hstack([left, -A])
    V = np.vstack([A.T, B.T])
    return U, V


def _smw_core(U, V):
    """Factor the 2n x 2n SMW system (I - V U / 2); raise if near-singular."""
    two_n = U.shape[1]
    S = np.eye(two_n) - 0.5 * (V @ U)
    try:
        lu, piv = scipy.linalg.lu_factor(S)
    except scipy.linalg.LinAlgError as exc:
        raise RetractionSingularError(str(exc)) from exc
    if np.linalg.cond(S) > COND_LIMIT:
        raise RetractionSingularError(
            f"SMW system condition estimate exceeds {COND_LIMIT:.0e}"
        )
    return lu, piv


def _cayley_apply(U, V, M):
    """Apply cay(A/2) = (I - UV/2)^{-1}(I + UV/2) to the N x m matrix M via SMW."""
    lu, piv = _smw_core(U, V)
    VM = V @ M
    first = M + 0.5 * U @ VM
    rhs = VM + 0.5 * (V @ U) @ VM
    return first + 0.5 * U @ scipy.linalg.lu_solve((lu, piv), rhs)


def cayley_retract(X, Z):
    """Cayley retraction R_X(Z) = cay(A_{X,Z}/2) X through the factored SMW form."""
    U, V = cayley_factors(X, Z)
    return StiefelPoint(_cayley_apply(U, V, X.data))


def transport_submanifold(X, Z, Y, retracted=None):
    """Projection-based transport of Y along Z: project Y onto the tangent space at R_X(Z)."""
    Z.require_anchor(X)
    Y.require_anchor(X)
    Phi = retracted if retracted is not None else cayley_retract(X, Z)
    P = Phi.data
    PtY = P.T @ Y.data
    out = Y.data - 0.5 * P @ (PtY + Y.data.T @ P)
    return TangentVector(out, Phi, check=False)


def transport_differential(X, Z, Y, retracted=None):
    """Differentiated-retraction transport of Y along Z.

    Evaluates (I - A_{X,Z}/2)^{-1} A_{X,Y} (I - A_{X,Z}/2)^{-1} X through the
    SMW expansion; the result is tangent at R_X(Z).
    """
    Z.require_anchor(X)
    Y.require_anchor(X)
    U, V = cayley_factors(X, Z)
    UY, VY = cayley_factors(X, Y)
    lu, piv = _smw_core(U, V)

    # W = (I - A_{X,Z}/2)^{-1} X
    VX = V @ X.data
    W = X.data + 0.5 * U @ scipy.linalg.lu_solve((lu, piv), VX)
    # A_{X,Y} W = UY (VY W)
    AW = UY @ (VY @ W)
    # (I - A_{X,Z}/2)^{-1} (A_{X,Y} W)
    out = AW + 0.5 * U @ scipy.linalg.lu_solve((lu, piv), V @ AW)

    Phi = retracted if retracted is not None else StiefelPoint(_cayley_apply(U, V, X.data))
    return TangentVector(project_tangent(Phi, out).data, Phi, check=False)


def transport(kind, X, Z, Y, retracted=None):
    if kind is TransportKind.Submanifold:
        return transport_submanifold(X, Z, Y, retracted)
    if kind is TransportKind.Differential:
        return transport_differential(X, Z, Y, retracted)
    raise DimensionError(f"unknown transport {kind!r}")
