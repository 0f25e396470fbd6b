"""Run configuration: flat key-value config files and the V1-V10 variant table."""

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .network import LossKind
from .stiefel import MetricKind, TransportKind

# variant -> (epochwise, normalized, loss, optimizer, metric, transport)
# optimizer: 'homogeneous', 'stiefel', 'stiefel_decay'
VARIANTS = {
    "V1": (False, False, LossKind.Relative, "homogeneous", None, None),
    "V2": (True, False, LossKind.Relative, "homogeneous", None, None),
    "V3": (True, True, LossKind.Relative, "homogeneous", None, None),
    "V4": (True, True, LossKind.ScaledMSE, "homogeneous", None, None),
    "V5": (True, True, LossKind.Relative, "stiefel",
           MetricKind.Canonical, TransportKind.Submanifold),
    "V6": (True, True, LossKind.Relative, "stiefel_decay",
           MetricKind.Canonical, TransportKind.Submanifold),
    "V7": (True, True, LossKind.Relative, "stiefel_decay",
           MetricKind.Canonical, TransportKind.Differential),
    "V8": (True, True, LossKind.Relative, "stiefel_decay",
           MetricKind.Euclidean, TransportKind.Submanifold),
    "V9": (True, True, LossKind.Relative, "stiefel_decay",
           MetricKind.Euclidean, TransportKind.Differential),
    "V10": (True, True, LossKind.ScaledMSE, "stiefel_decay",
            MetricKind.Canonical, TransportKind.Submanifold),
}


@dataclass
class RunConfig:
    model: str = "wave"                # wave | sg_single_soliton | sg_doublets
    N: int = 32
    n_range: list = field(default_factory=lambda: [4])
    n_epochs: int = 10
    batch_size: int = 32
    time_steps: int = 50
    params: list = field(default_factory=list)      # training mu / nu values
    testing_params: list = field(default_factory=list)
    loss: LossKind = LossKind.Relative
    epochwise: bool = True
    normalized: bool = True
    optimizer: str = "homogeneous"     # homogeneous | stiefel | stiefel_decay
    metric: MetricKind = MetricKind.Canonical
    transport: TransportKind = TransportKind.Submanifold
    t0: float = 0.0
    t1: float = 1.0
    a: float = -0.5
    b: float = 0.5
    eta: float = 0.001
    seed: int = 0
    variant: str = ""

    def validate(self):
        if self.model not in ("wave", "sg_single_soliton", "sg_doublets"):
            raise ConfigError(f"unknown model {self.model!r}")
        if self.model == "wave" and (self.t0, self.t1, self.a, self.b) != (0.0, 1.0, -0.5, 0.5):
            raise ConfigError("wave model fixes I=[0,1], Omega=[-1/2,1/2]")
        if self.optimizer not in ("homogeneous", "stiefel", "stiefel_decay"):
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
        if not self.params:
            raise ConfigError("no training parameters")
        return self

    def apply_variant(self, name):
        if name not in VARIANTS:
            raise ConfigError(f"unknown variant {name!r}")
        (self.epochwise, self.normalized, self.loss, self.optimizer,
         metric, transport) = VARIANTS[name]
        if metric is not None:
            self.metric = metric
            self.transport = transport
        self.variant = name
        return self


def _parse_list(text):
    return [float(v) for v in text.replace(",", " ").split()]


def load_config(path):
    """Parse a flat key = value config file (\"#\" starts a comment)."""
    cfg = RunConfig()
    pairs = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"malformed config line: {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        pairs[key] = value

    if "variant" in pairs:
        cfg.apply_variant(pairs.pop("variant"))

    for key, value in pairs.items():
        if key == "model":
            cfg.model = value
        elif key in ("N", "n_epochs", "batch_size", "time_steps", "seed"):
            setattr(cfg, key, int(value))
        elif key == "n_range":
            cfg.n_range = [int(float(v)) for v in value.replace(",", " ").split()]
        elif key in ("mu_list", "nu_list", "params"):
            cfg.params = _parse_list(value)
        elif key in ("mu_left", "mu_right", "n_params"):
            continue  # handled collectively below
        elif key in ("testing", "testing_params"):
            cfg.testing_params = _parse_list(value)
        elif key == "loss":
            cfg.loss = LossKind.Relative if value.lower().startswith("rel") else LossKind.ScaledMSE
        elif key == "epochwise":
            cfg.epochwise = value.lower() in ("1", "true", "yes")
        elif key == "normalized":
            cfg.normalized = value.lower() in ("1", "true", "yes")
        elif key == "optimizer":
            cfg.optimizer = value
        elif key == "metric":
            cfg.metric = MetricKind.Canonical if value.lower().startswith("can") else MetricKind.Euclidean
        elif key == "transport":
            cfg.transport = (TransportKind.Submanifold if value.lower().startswith("sub")
                             else TransportKind.Differential)
        elif key in ("t0", "t1", "a", "b", "eta"):
            setattr(cfg, key, float(value))
        else:
            raise ConfigError(f"unknown config key {key!r}")

    if "mu_left" in pairs and "mu_right" in pairs and "n_params" in pairs:
        import numpy as np
        cfg.params = list(np.linspace(float(pairs["mu_left"]), float(pairs["mu_right"]),
                                      int(pairs["n_params"])))
    return cfg.validate()
