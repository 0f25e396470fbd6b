"""Tour of the Stiefel geometry primitives.

Draws a random point on St(3, 8), projects an ambient direction onto the
tangent space, retracts along it with the Cayley transform, and carries a
second tangent vector to the new point with both transports.
"""

import numpy as np

from sympmor.stiefel import (
    MetricKind,
    cayley_retract,
    metric_inner,
    project_tangent,
    random_stiefel,
    riemannian_gradient,
    transport_differential,
    transport_submanifold,
)


def main():
    rng = np.random.default_rng(0)
    X = random_stiefel(8, 3, seed=1)
    print("point on St(3, 8), orthonormality residual:", X.ortho_residual())

    Z = project_tangent(X, rng.standard_normal((8, 3)))
    print("tangency residual of projected direction:",
          np.linalg.norm(X.data.T @ Z.data + Z.data.T @ X.data))

    egrad = rng.standard_normal((8, 3))
    for metric in MetricKind:
        g = riemannian_gradient(metric, X, egrad)
        print(f"{metric.name} gradient norm:",
              np.sqrt(metric_inner(metric, X, g, g)))

    Y = cayley_retract(X, Z)
    print("retracted point residual:", Y.ortho_residual())

    W = project_tangent(X, rng.standard_normal((8, 3)))
    for name, fn in [("submanifold", transport_submanifold),
                     ("differential", transport_differential)]:
        T = fn(X, Z, W, retracted=Y)
        res = np.linalg.norm(Y.data.T @ T.data + T.data.T @ Y.data)
        print(f"{name} transport lands tangent at Y, residual {res:.2e}")


if __name__ == "__main__":
    main()
