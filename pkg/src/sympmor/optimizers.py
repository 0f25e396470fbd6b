"""Adam-type optimizer updates.

Three update rules share the hyperparameter record:

* ``adam_step``: classic Euclidean Adam (used for GradientLayer parameters),
  with the bias correction folded into the moment updates.
* ``homogeneous_psd_update``: the baseline manifold optimizer. The gradient is
  lifted into the fixed global tangent space g^{hor,E} through a QR section,
  Adam runs pointwise on the stored blocks, and the result retracts back.
  Caches persist across steps without transport (the global space is fixed),
  but the section is recomputed every step.
* ``stiefel_psd_update``: the direct St(n,N) update. One first-moment cache
  lives in the tangent space at the current iterate and is carried along by a
  vector transport after each Cayley retraction.
"""

from dataclasses import dataclass, field

import numpy as np

from . import stiefel as st
from .homogeneous import HorizontalElement, horizontal_pointwise, lift_to_global, retract_global, section_qr
from .stiefel import MetricKind, StiefelPoint, TangentVector, TransportKind


@dataclass
class AdamHyper:
    eta: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.99
    delta: float = 1e-8
    decay: float | None = None  # 0.9995 when enabled
    t: int = 1
    beta1_t: float = field(default=None)
    beta2_t: float = field(default=None)

    def __post_init__(self):
        if self.beta1_t is None:
            self.beta1_t = self.beta1 ** self.t
        if self.beta2_t is None:
            self.beta2_t = self.beta2 ** self.t

    def moment_coeffs(self):
        """(old, new) mixing weights for B1 and B2 with bias correction folded in."""
        c1 = (self.beta1 - self.beta1_t) / (1.0 - self.beta1_t)
        c1n = (1.0 - self.beta1) / (1.0 - self.beta1_t)
        c2 = (self.beta2 - self.beta2_t) / (1.0 - self.beta2_t)
        c2n = (1.0 - self.beta2) / (1.0 - self.beta2_t)
        return c1, c1n, c2, c2n


def update_hyper(hyper):
    """Advance the step counter, the cached beta powers, and (optionally) decay eta."""
    hyper.t += 1
    hyper.beta1_t *= hyper.beta1
    hyper.beta2_t *= hyper.beta2
    if hyper.decay is not None:
        hyper.eta *= hyper.decay
    return hyper


class EuclideanAdamCache:
    """First/second moment arrays shaped like the parameter tensor."""

    def __init__(self, shape):
        self.B1 = np.zeros(shape)
        self.B2 = np.zeros(shape)


def adam_step(hyper, cache, Y):
    """Classic Adam: mutate the caches and return the update V = -eta B1 / sqrt(B2 + delta)."""
    c1, c1n, c2, c2n = hyper.moment_coeffs()
    cache.B1 = c1 * cache.B1 + c1n * Y
    cache.B2 = c2 * cache.B2 + c2n * (Y * Y)
    return -hyper.eta * cache.B1 / np.sqrt(cache.B2 + hyper.delta)


class HomogeneousAdamCache:
    """Moment storage over g^{hor,E} in compact block form."""

    def __init__(self, N, n):
        self.B1 = HorizontalElement(np.zeros((n, n)), np.zeros((N - n, n)))
        self.B2 = HorizontalElement(np.zeros((n, n)), np.zeros((N - n, n)))


def homogeneous_psd_update(hyper, cache, X, egrad, seed):
    """One baseline update: rgrad -> section -> lift -> blockwise Adam -> retract."""
    Z = st.riemannian_gradient(MetricKind.Canonical, X, egrad)
    section = section_qr(X, seed)
    B = lift_to_global(section, Z)

    c1, c1n, c2, c2n = hyper.moment_coeffs()
    cache.B1 = horizontal_pointwise(
        horizontal_pointwise(cache.B1, op="scale", s=c1),
        horizontal_pointwise(B, op="scale", s=c1n),
        op="add",
    ).reskewed()
    cache.B2 = horizontal_pointwise(
        horizontal_pointwise(cache.B2, op="scale", s=c2),
        horizontal_pointwise(horizontal_pointwise(B, B, op="mul"), op="scale", s=c2n),
        op="add",
    )
    denom = horizontal_pointwise(cache.B2, op="sqrt_add_delta", delta=hyper.delta)
    V = horizontal_pointwise(
        horizontal_pointwise(cache.B1, denom, op="div"), op="scale", s=-hyper.eta
    ).reskewed()

    X_new = retract_global(section, V)
    update_hyper(hyper)
    return X_new


class StiefelAdamCache:
    """Single first-moment cache, tangent at the current iterate."""

    def __init__(self, X):
        self.B1 = TangentVector(np.zeros(X.shape), X, check=False)


def stiefel_adam_step(hyper, cache, X, Z):
    """Modified Adam on St(n,N): returns the tangent update direction V.

    The second moment is formed elementwise from the old B1 and the fresh
    gradient; the skew part of the update is scaled by the elementwise square
    root of the Gram matrix B2^T B2, the complement part elementwise by B2.
    Mutates cache.B1 in place.
    """
    Z.require_anchor(X)
    cache.B1.require_anchor(X)
    c1, c1n, c2, c2n = hyper.moment_coeffs()
    B1, G = cache.B1.data, Z.data

    B2 = np.sqrt(c2 * (B1 * B1) + c2n * (G * G) + hyper.delta)
    B1 = c1 * B1 + c1n * G
    cache.B1 = TangentVector(B1, X, check=False)

    A = X.data
    W = A.T @ B1
    K_part = B1 - A @ W
    skew_part = A @ (W / np.sqrt(B2.T @ B2))
    comp = K_part / B2
    comp_part = comp - A @ (A.T @ comp)
    return TangentVector(-hyper.eta * (skew_part + comp_part), X, check=False)


def stiefel_psd_update(hyper, cache, X, egrad, metric, transport_kind):
    """One direct update: rgrad -> StiefelAdam -> Cayley retract -> transport the cache."""
    Z = st.riemannian_gradient(metric, X, egrad)
    V = stiefel_adam_step(hyper, cache, X, Z)
    X_new = st.cayley_retract(X, V)
    cache.B1 = st.transport(transport_kind, X, V, cache.B1, retracted=X_new)
    update_hyper(hyper)
    return X_new


def gradient_descent_step(hyper, X, egrad, metric=MetricKind.Canonical):
    """Plain Riemannian gradient descent behind the same interface (debugging aid)."""
    Z = st.riemannian_gradient(metric, X, egrad)
    V = TangentVector(-hyper.eta * Z.data, X, check=False)
    X_new = st.cayley_retract(X, V)
    update_hyper(hyper)
    return X_new
