"""Symplectic autoencoder: layers, losses, and training loops.

The network alternates two symplectic layer types.  GradientLayers update one
half of phase space through K^T diag(a) sigma(K . + b) and are
dimension-preserving; PSDLayers apply the cotangent-lift map blockdiag(X, X)
(or its symplectic inverse) with a Stiefel weight and change the dimension.
Backpropagation is written out analytically per layer; the manifold weight
receives its Euclidean gradient, which the optimizer module converts into a
Riemannian update.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from . import optimizers as opt
from . import stiefel as st
from .errors import DegenerateBatchError, DimensionError
from .stiefel import MetricKind, StiefelPoint, TransportKind


class Activation(enum.Enum):
    tanh = "tanh"
    relu = "relu"
    explu = "explu"


def _act(kind, u):
    if kind is Activation.tanh:
        return np.tanh(u)
    if kind is Activation.relu:
        return np.maximum(u, 0.0)
    # explu: exponential below zero, linear above
    return np.where(u > 0.0, u, np.exp(u) - 1.0)


def _act_prime(kind, u):
    if kind is Activation.tanh:
        return 1.0 - np.tanh(u) ** 2
    if kind is Activation.relu:
        return (u > 0.0).astype(float)
    return np.where(u > 0.0, 1.0, np.exp(u))


class LossKind(enum.Enum):
    Relative = "relative"
    ScaledMSE = "scaled_mse"


class GradientLayer:
    """Dimension-preserving symplectic layer.

    kind 'P': [q; p] -> [q; p + K^T diag(a) sigma(K q + b)]
    kind 'Q': [q; p] -> [q + K^T diag(a) sigma(K p + b); p]
    """

    def __init__(self, kind, dim, upscale, K, a, b, activation=Activation.tanh):
        if dim % 2:
            raise DimensionError("GradientLayer dim must be even")
        self.kind = kind
        self.dim = dim
        self.upscale = upscale
        self.K = K          # L x (dim/2)
        self.a = a          # L
        self.b = b          # L
        self.activation = activation

    def forward(self, x):
        half = self.dim // 2
        if x.shape[0] != self.dim:
            raise DimensionError(f"expected {self.dim} rows, got {x.shape[0]}")
        q, p = x[:half], x[half:]
        driver = q if self.kind == "P" else p
        u = self.K @ driver + self.b[:, None]
        s = _act(self.activation, u)
        add = self.K.T @ (self.a[:, None] * s)
        if self.kind == "P":
            out = np.vstack([q, p + add])
        else:
            out = np.vstack([q + add, p])
        return out, (x, u)

    def backward(self, tape, upstream):
        x, u = tape
        half = self.dim // 2
        q, p = x[:half], x[half:]
        driver = q if self.kind == "P" else p
        g_q, g_p = upstream[:half], upstream[half:]
        g = g_p if self.kind == "P" else g_q  # gradient flowing into the nonlinear branch
        s = _act(self.activation, u)
        sp = _act_prime(self.activation, u)
        Kg = self.K @ g
        da = np.sum(s * Kg, axis=1)
        db = np.sum(self.a[:, None] * sp * Kg, axis=1)
        inner = self.a[:, None] * sp * Kg
        dK = (self.a[:, None] * s) @ g.T + inner @ driver.T
        coupled = self.K.T @ inner
        if self.kind == "P":
            input_grad = np.vstack([g_q + coupled, g_p])
        else:
            input_grad = np.vstack([g_q, g_p + coupled])
        return input_grad, {"K": dK, "a": da, "b": db}

    def differential(self, tape, dx):
        """Forward-mode directional derivative at the taped input."""
        x, u = tape
        half = self.dim // 2
        dq, dp = dx[:half], dx[half:]
        sp = _act_prime(self.activation, u)
        if self.kind == "P":
            dadd = self.K.T @ (self.a[:, None] * sp * (self.K @ dq))
            return np.vstack([dq, dp + dadd])
        dadd = self.K.T @ (self.a[:, None] * sp * (self.K @ dp))
        return np.vstack([dq + dadd, dp])


class PSDLayer:
    """Linear symplectic reduce/expand layer with Stiefel weight X.

    Expand (2n -> 2N): blockdiag(X, X); Reduce (2N -> 2n): blockdiag(X^T, X^T).
    Applied blockwise; the 2N x 2n block matrix is never formed.
    """

    def __init__(self, weight, direction):
        self.weight = weight            # StiefelPoint, N x n
        self.direction = direction      # 'reduce' or 'expand'

    @property
    def in_dim(self):
        N, n = self.weight.shape
        return 2 * N if self.direction == "reduce" else 2 * n

    @property
    def out_dim(self):
        N, n = self.weight.shape
        return 2 * n if self.direction == "reduce" else 2 * N

    def forward(self, x):
        if x.shape[0] != self.in_dim:
            raise DimensionError(f"expected {self.in_dim} rows, got {x.shape[0]}")
        half = x.shape[0] // 2
        q, p = x[:half], x[half:]
        A = self.weight.data
        if self.direction == "expand":
            out = np.vstack([A @ q, A @ p])
        else:
            out = np.vstack([A.T @ q, A.T @ p])
        return out, (x,)

    def backward(self, tape, upstream):
        (x,) = tape
        half = x.shape[0] // 2
        q, p = x[:half], x[half:]
        uhalf = upstream.shape[0] // 2
        g_q, g_p = upstream[:uhalf], upstream[uhalf:]
        A = self.weight.data
        if self.direction == "expand":
            input_grad = np.vstack([A.T @ g_q, A.T @ g_p])
            egrad = g_q @ q.T + g_p @ p.T
        else:
            input_grad = np.vstack([A @ g_q, A @ g_p])
            egrad = q @ g_q.T + p @ g_p.T
        return input_grad, {"X": egrad}

    def differential(self, tape, dx):
        return self.forward(dx)[0] if dx.shape[0] == self.in_dim else None


@dataclass
class Network:
    layers: list
    encoder_len: int
    full_dim: int
    reduced_dim: int

    def forward(self, batch):
        if batch.shape[0] != self.full_dim:
            raise DimensionError(f"expected {self.full_dim} rows")
        tape = []
        x = batch
        for layer in self.layers:
            x, entry = layer.forward(x)
            tape.append(entry)
        return x, tape

    def encode(self, x):
        single = x.ndim == 1
        if single:
            x = x[:, None]
        for layer in self.layers[: self.encoder_len]:
            x, _ = layer.forward(x)
        return x[:, 0] if single else x

    def decode(self, xr):
        single = xr.ndim == 1
        if single:
            xr = xr[:, None]
        for layer in self.layers[self.encoder_len:]:
            xr, _ = layer.forward(xr)
        return xr[:, 0] if single else xr

    def decoder_jacobian(self, x_r):
        """Exact Jacobian of the decoder at x_r via forward-mode basis propagation."""
        x = np.asarray(x_r, dtype=float)[:, None]
        D = np.eye(self.reduced_dim)
        for layer in self.layers[self.encoder_len:]:
            x_next, tape = layer.forward(x)
            D = layer.differential(tape, D)
            x = x_next
        return D


def loss(kind, Xb, Yb):
    if Xb.shape != Yb.shape:
        raise DimensionError("loss operands must share a shape")
    diff = np.linalg.norm(Xb - Yb)
    if kind is LossKind.ScaledMSE:
        return diff ** 2 / Xb.size
    denom = np.linalg.norm(Xb)
    if denom == 0.0:
        raise DegenerateBatchError("relative loss on a zero-norm batch")
    return diff / denom


def loss_backward(kind, Xb, Yb):
    """Gradient of loss with respect to the network output Yb."""
    if kind is LossKind.ScaledMSE:
        return (Yb - Xb) * (2.0 / Xb.size)
    denom = np.linalg.norm(Xb)
    if denom == 0.0:
        raise DegenerateBatchError("relative loss on a zero-norm batch")
    diff = np.linalg.norm(Xb - Yb)
    if diff == 0.0:
        return np.zeros_like(Xb)
    return (Yb - Xb) / (diff * denom)


def build_network(full_dim, reduced_dim, seed, activation=Activation.tanh,
                  alternate_pq=False):
    """Assemble the 9-layer autoencoder.

    Encoder: 4 GradientLayers at width 2d, then a PSD reduce to 2n.
    Decoder: 2 GradientLayers at width 2n, a PSD expand to 2d, one more
    GradientLayer at width 2d.
    """
    if full_dim % 2 or reduced_dim % 2:
        raise DimensionError("dims must be even")
    d, n = full_dim // 2, reduced_dim // 2
    if n > d:
        raise DimensionError("reduced dim exceeds full dim")
    rng = np.random.default_rng(seed)

    def make_gradient(dim, index):
        half = dim // 2
        L = 5 * half
        limit = np.sqrt(6.0 / (L + half))
        K = rng.uniform(-limit, limit, size=(L, half))
        a = rng.uniform(-limit, limit, size=L) / L
        b = np.zeros(L)
        kind = "Q" if (alternate_pq and index % 2) else "P"
        return GradientLayer(kind, dim, L, K, a, b, activation)

    layers = []
    for i in range(4):
        layers.append(make_gradient(full_dim, i))
    seed_enc, seed_dec = rng.integers(0, 2 ** 62, size=2)
    layers.append(PSDLayer(st.random_stiefel(d, n, int(seed_enc)), "reduce"))
    for i in range(2):
        layers.append(make_gradient(reduced_dim, i))
    layers.append(PSDLayer(st.random_stiefel(d, n, int(seed_dec)), "expand"))
    layers.append(make_gradient(full_dim, 0))
    return Network(layers=layers, encoder_len=5, full_dim=full_dim,
                   reduced_dim=reduced_dim)


@dataclass
class OptimizerConfig:
    """Which manifold optimizer drives the PSD weights, and how."""

    kind: str = "homogeneous"        # 'homogeneous' or 'stiefel'
    decay: bool = False
    metric: MetricKind = MetricKind.Canonical
    transport: TransportKind = TransportKind.Submanifold
    eta: float = 0.001
    run_seed: int = 0


class Trainer:
    """Owns one optimizer state per layer and performs batch updates."""

    def __init__(self, net, config):
        self.net = net
        self.config = config
        decay = 0.9995 if config.decay else None
        self.states = []
        for layer in net.layers:
            if isinstance(layer, GradientLayer):
                hyper = opt.AdamHyper(eta=config.eta, decay=decay)
                caches = {
                    "K": opt.EuclideanAdamCache(layer.K.shape),
                    "a": opt.EuclideanAdamCache(layer.a.shape),
                    "b": opt.EuclideanAdamCache(layer.b.shape),
                }
                self.states.append(("gradient", hyper, caches))
            else:
                hyper = opt.AdamHyper(eta=config.eta, decay=decay)
                if config.kind == "homogeneous":
                    N, n = layer.weight.shape
                    cache = opt.HomogeneousAdamCache(N, n)
                else:
                    cache = opt.StiefelAdamCache(layer.weight)
                self.states.append(("psd", hyper, cache))
        self.step_index = 0

    def update(self, grads_per_layer):
        cfg = self.config
        for layer, state, grads in zip(self.net.layers, self.states, grads_per_layer):
            tag, hyper, cache = state
            if tag == "gradient":
                layer.K += opt.adam_step(hyper, cache["K"], grads["K"])
                layer.a += opt.adam_step(hyper, cache["a"], grads["a"])
                layer.b += opt.adam_step(hyper, cache["b"], grads["b"])
                opt.update_hyper(hyper)
            else:
                if cfg.kind == "homogeneous":
                    layer.weight = opt.homogeneous_psd_update(
                        hyper, cache, layer.weight, grads["X"],
                        seed=cfg.run_seed + self.step_index,
                    )
                else:
                    layer.weight = opt.stiefel_psd_update(
                        hyper, cache, layer.weight, grads["X"],
                        cfg.metric, cfg.transport,
                    )
                layer.weight = layer.weight.renormalized()
        self.step_index += 1

    def train_batch(self, loss_kind, batch):
        out, tape = self.net.forward(batch)
        value = loss(loss_kind, batch, out)
        upstream = loss_backward(loss_kind, batch, out)
        grads = []
        for layer, entry in zip(reversed(self.net.layers), reversed(tape)):
            upstream, g = layer.backward(entry, upstream)
            grads.append(g)
        self.update(list(reversed(grads)))
        return value


def train_epoch(trainer, data, batch_size, loss_kind, rng):
    """One pass over the data: shuffle columns, partition, update per batch.

    The final short batch is kept; the return value is the plain mean of the
    per-batch losses.
    """
    cols = data.shape[1]
    if cols == 0:
        raise DegenerateBatchError("empty training set")
    order = rng.permutation(cols)
    losses = []
    for start in range(0, cols, batch_size):
        batch = data[:, order[start:start + batch_size]]
        losses.append(trainer.train_batch(loss_kind, batch))
    return float(np.mean(losses))


def train_epochwise(trainer, data, batch_size, n_epochs, loss_kind, seed):
    rng = np.random.default_rng(seed)
    return [train_epoch(trainer, data, batch_size, loss_kind, rng)
            for _ in range(n_epochs)]


def train_noepoch(trainer, data, batch_size, n_epochs, loss_kind, seed):
    """Sample batches with replacement; ceil(n_epochs * cols / batch) iterations."""
    cols = data.shape[1]
    if cols == 0:
        raise DegenerateBatchError("empty training set")
    n_iter = int(np.ceil(n_epochs * cols / batch_size))
    rng = np.random.default_rng(seed)
    losses = []
    for _ in range(n_iter):
        idx = rng.integers(0, cols, size=batch_size)
        losses.append(trainer.train_batch(loss_kind, data[:, idx]))
    return losses
