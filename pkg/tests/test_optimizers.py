"""Optimizer updates: hand-computed Adam oracles and manifold invariants."""

import numpy as np

from sympmor.homogeneous import section_qr
from sympmor.optimizers import (
    AdamHyper,
    EuclideanAdamCache,
    HomogeneousAdamCache,
    StiefelAdamCache,
    adam_step,
    gradient_descent_step,
    homogeneous_psd_update,
    stiefel_adam_step,
    stiefel_psd_update,
    update_hyper,
)
from sympmor.stiefel import (
    MetricKind,
    TransportKind,
    project_tangent,
    random_stiefel,
    riemannian_gradient,
)


def rand_tangent(X, seed):
    rng = np.random.default_rng(seed)
    return project_tangent(X, rng.standard_normal(X.shape))


def test_moment_coeffs_first_step():
    h = AdamHyper()
    c1, c1n, c2, c2n = h.moment_coeffs()
    # at t = 1 the bias correction removes the old moment entirely
    assert abs(c1) < 1e-15 and abs(c1n - 1.0) < 1e-15
    assert abs(c2) < 1e-15 and abs(c2n - 1.0) < 1e-15
    # at t = 2: c1 = (b1 - b1^2)/(1 - b1^2) = b1/(1 + b1)
    update_hyper(h)
    c1, c1n, c2, c2n = h.moment_coeffs()
    assert abs(c1 - 0.9 / 1.9) < 1e-15
    assert abs(c1n - 0.1 / 0.19) < 1e-15
    assert abs(c2 - 0.99 / 1.99) < 1e-15
    assert abs(c1 + c1n - 1.0) < 1e-14
    assert abs(c2 + c2n - 1.0) < 1e-14


def test_update_hyper_decay():
    h = AdamHyper(decay=0.9995)
    eta0 = h.eta
    for _ in range(10):
        update_hyper(h)
    assert abs(h.eta - eta0 * 0.9995 ** 10) < 1e-18
    assert h.t == 11
    assert abs(h.beta1_t - 0.9 ** 11) < 1e-15
    assert abs(h.beta2_t - 0.99 ** 11) < 1e-15


def test_adam_step_matches_reference_formulation():
    """Folded-bias-correction Adam equals the textbook m-hat / v-hat form."""
    rng = np.random.default_rng(0)
    shape = (3, 4)
    h = AdamHyper()
    cache = EuclideanAdamCache(shape)
    m = np.zeros(shape)
    v = np.zeros(shape)
    for step in range(1, 8):
        g = rng.standard_normal(shape)
        V = adam_step(h, cache, g)
        m = h.beta1 * m + (1 - h.beta1) * g
        v = h.beta2 * v + (1 - h.beta2) * g * g
        mhat = m / (1 - h.beta1 ** step)
        vhat = v / (1 - h.beta2 ** step)
        ref = -h.eta * mhat / np.sqrt(vhat + h.delta)
        assert np.linalg.norm(V - ref) < 1e-12
        update_hyper(h)


def test_adam_first_step_direction():
    h = AdamHyper()
    cache = EuclideanAdamCache((2, 2))
    g = np.array([[4.0, -9.0], [0.0, 1.0]])
    V = adam_step(h, cache, g)
    # first step: V = -eta g / sqrt(g^2 + delta), close to -eta sign(g)
    ref = -h.eta * g / np.sqrt(g * g + h.delta)
    assert np.linalg.norm(V - ref) < 1e-16
    assert np.all(np.sign(V[np.abs(g) > 0]) == -np.sign(g[np.abs(g) > 0]))


def quad_target(N, n, seed):
    """f(X) = ||X - T||_F^2 / 2 with T fixed; egrad = X - T."""
    rng = np.random.default_rng(seed)
    T = rng.standard_normal((N, n))

    def f(X):
        return 0.5 * np.sum((X.data - T) ** 2)

    def egrad(X):
        return X.data - T

    return f, egrad


def test_stiefel_adam_update_is_tangent():
    X = random_stiefel(12, 4, 1)
    h = AdamHyper()
    cache = StiefelAdamCache(X)
    Z = riemannian_gradient(MetricKind.Canonical, X, np.random.default_rng(2).standard_normal((12, 4)))
    V = stiefel_adam_step(h, cache, X, Z)
    res = np.linalg.norm(X.data.T @ V.data + V.data.T @ X.data)
    assert res < 1e-12
    # the cache was mutated to the new first moment
    assert np.linalg.norm(cache.B1.data - Z.data) < 1e-14  # first step: B1 = Z


def test_stiefel_psd_update_descends_and_stays_feasible():
    f, egrad = quad_target(10, 3, 7)
    for metric in MetricKind:
        for kind in TransportKind:
            X = random_stiefel(10, 3, 3)
            h = AdamHyper(eta=0.05)
            cache = StiefelAdamCache(X)
            vals = [f(X)]
            for _ in range(60):
                X = stiefel_psd_update(h, cache, X, egrad(X), metric, kind)
                vals.append(f(X))
                assert X.ortho_residual() < 1e-9
                # the transported cache stays tangent at the new iterate
                res = np.linalg.norm(X.data.T @ cache.B1.data + cache.B1.data.T @ X.data)
                assert res < 1e-9
            assert vals[-1] < vals[0] - 0.05 * abs(vals[0])


def test_homogeneous_psd_update_descends_and_stays_feasible():
    f, egrad = quad_target(11, 3, 17)
    X = random_stiefel(11, 3, 4)
    h = AdamHyper(eta=0.05)
    cache = HomogeneousAdamCache(11, 3)
    vals = [f(X)]
    for step in range(60):
        X = homogeneous_psd_update(h, cache, X, egrad(X), seed=1000 + step)
        vals.append(f(X))
        assert X.ortho_residual() < 1e-9
        assert np.linalg.norm(cache.B1.skew_block + cache.B1.skew_block.T) < 1e-12
    assert vals[-1] < vals[0] - 0.05 * abs(vals[0])


def test_homogeneous_first_step_oracle():
    """First homogeneous step computed by hand through dense blocks."""
    X = random_stiefel(7, 2, 5)
    rng = np.random.default_rng(6)
    egrad = rng.standard_normal((7, 2))
    h = AdamHyper()
    cache = HomogeneousAdamCache(7, 2)
    seed = 42
    out = homogeneous_psd_update(h, cache, X, egrad, seed=seed)

    # oracle: canonical rgrad, lift, V = -eta B / sqrt(B*B + delta), retract
    from sympmor.homogeneous import HorizontalElement, lift_to_global, retract_global

    Z = riemannian_gradient(MetricKind.Canonical, X, egrad)
    sec = section_qr(X, seed)
    B = lift_to_global(sec, Z)
    W = -h.__class__().eta * B.skew_block / np.sqrt(B.skew_block ** 2 + 1e-8)
    C = -h.__class__().eta * B.comp_block / np.sqrt(B.comp_block ** 2 + 1e-8)
    ref = retract_global(sec, HorizontalElement((W - W.T) / 2, C))
    assert np.linalg.norm(out.data - ref.data) < 1e-12


def test_gradient_descent_step():
    f, egrad = quad_target(8, 2, 23)
    X = random_stiefel(8, 2, 9)
    h = AdamHyper(eta=0.1)
    vals = [f(X)]
    for _ in range(40):
        X = gradient_descent_step(h, X, egrad(X))
        vals.append(f(X))
    assert vals[-1] < vals[0]
    assert X.ortho_residual() < 1e-10
