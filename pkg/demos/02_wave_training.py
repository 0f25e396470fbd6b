"""Train the symplectic autoencoder on linear wave snapshots.

Generates snapshots for five wave speeds, normalizes them, and trains two
variants side by side: the homogeneous-space baseline (V3) and the direct
Stiefel optimizer with learning-rate decay (V6).
"""

import numpy as np

from sympmor.cli import generate_snapshots, train_run
from sympmor.config import RunConfig
from sympmor.reduction import normalize_snapshots


def make_config(variant):
    cfg = RunConfig().apply_variant(variant)
    cfg.model = "wave"
    cfg.N = 32
    cfg.n_range = [4]
    cfg.params = list(np.linspace(5.0 / 12.0, 2.0 / 3.0, 5))
    cfg.time_steps = 50
    cfg.batch_size = 32
    cfg.n_epochs = 10
    cfg.eta = 0.01
    cfg.seed = 7
    return cfg.validate()


def main():
    raw = generate_snapshots(make_config("V3"))
    norm = normalize_snapshots(raw)
    print(f"snapshot matrix: {norm.data.shape[0]} x {norm.data.shape[1]}")

    for variant in ("V3", "V6"):
        cfg = make_config(variant)
        summary = train_run(cfg, norm, f"out/wave_{variant}")[4]
        print(f"{variant}: first-epoch loss {summary['first_loss']:.4f} -> "
              f"final {summary['final_loss']:.4f} "
              f"({summary['wall_seconds']:.2f}s)")


if __name__ == "__main__":
    main()
