"""Command-line harness: data generation, training, evaluation, speed test.

Subcommands: generate-data, normalize, train, evaluate, psd, speed-test,
report.  Every command is deterministic given (config, seed) and exits
nonzero with a machine-readable "error: ..." line on failure.
"""

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import models, network as net, optimizers as opt, reduction as red
from . import stiefel as st
from .config import RunConfig, load_config
from .errors import SympmorError
from .integrators import Trajectory, implicit_midpoint
from .network import LossKind
from .snapshot_io import read_snapshot_file, write_snapshot_file
from .stiefel import MetricKind, TransportKind


# -- data generation --------------------------------------------------------

def generate_snapshots(cfg):
    """Snapshot set for the configured model: integrated (wave) or analytic (sine-Gordon)."""
    K = cfg.time_steps
    blocks, inits = [], []
    if cfg.model == "wave":
        for mu in cfg.params:
            model = models.wave_build(cfg.N, mu)
            x0 = models.wave_initial(cfg.N, mu)
            traj = implicit_midpoint(models.wave_system(model), x0, cfg.t0, cfg.t1, K)
            blocks.append(traj.states)
    else:
        kind = (models.SgKind.SingleSoliton if cfg.model == "sg_single_soliton"
                else models.SgKind.Doublets)
        times = np.linspace(cfg.t0, cfg.t1, K + 1)
        for nu in cfg.params:
            model = models.sg_build(cfg.N, nu, cfg.a, cfg.b, kind)
            cols = np.empty((model.dim, K + 1))
            for k, t in enumerate(times):
                u, u_t = models.sg_exact(kind, nu, t, model.xi)
                cols[:, k] = np.concatenate([u, u_t])
            blocks.append(cols)
    data = np.hstack(blocks)
    return red.SnapshotSet(data=data, params=list(cfg.params), K=K,
                           t0=cfg.t0, t1=cfg.t1, normalized=False)


def fom_system_for(cfg, param):
    if cfg.model == "wave":
        return models.wave_system(models.wave_build(cfg.N, param)), models.wave_initial(cfg.N, param)
    kind = (models.SgKind.SingleSoliton if cfg.model == "sg_single_soliton"
            else models.SgKind.Doublets)
    model = models.sg_build(cfg.N, param, cfg.a, cfg.b, kind)
    return models.sg_system(model), models.sg_initial(model)


# -- training ---------------------------------------------------------------

def train_run(cfg, snapshots, out_dir):
    """Train one network per n in cfg.n_range; write loss CSVs and a manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    data = snapshots.data
    full_dim = data.shape[0]
    summaries = {}
    for n in cfg.n_range:
        t_start = time.perf_counter()
        network = net.build_network(full_dim, 2 * n, seed=cfg.seed)
        ocfg = net.OptimizerConfig(
            kind="homogeneous" if cfg.optimizer == "homogeneous" else "stiefel",
            decay=(cfg.optimizer == "stiefel_decay"),
            metric=cfg.metric,
            transport=cfg.transport,
            eta=cfg.eta,
            run_seed=cfg.seed,
        )
        trainer = net.Trainer(network, ocfg)
        if cfg.epochwise:
            losses = net.train_epochwise(trainer, data, cfg.batch_size,
                                         cfg.n_epochs, cfg.loss, seed=cfg.seed + 1)
        else:
            losses = net.train_noepoch(trainer, data, cfg.batch_size,
                                       cfg.n_epochs, cfg.loss, seed=cfg.seed + 1)
        wall = time.perf_counter() - t_start
        with open(out_dir / f"losses_n{n}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "avg_loss"])
            for i, value in enumerate(losses, start=1):
                writer.writerow([i, repr(float(value))])
        save_network(network, out_dir / f"params_n{n}.npz")
        summaries[n] = {"final_loss": float(losses[-1]),
                        "first_loss": float(losses[0]),
                        "wall_seconds": wall}
    manifest = {
        "config": {k: _jsonable(v) for k, v in vars(cfg).items()},
        "initialization": "K ~ U(+-sqrt(6/(L+fan_in))), a ~ same/L, b = 0; "
                          "PSD weights from seeded QR of normal samples",
        "summaries": {str(k): v for k, v in summaries.items()},
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))
    return summaries


def _jsonable(v):
    if isinstance(v, (LossKind, MetricKind, TransportKind)):
        return v.value
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def save_network(network, path):
    arrays, spec = {}, []
    for i, layer in enumerate(network.layers):
        if isinstance(layer, net.GradientLayer):
            spec.append({"type": "gradient", "kind": layer.kind, "dim": layer.dim,
                         "upscale": layer.upscale, "activation": layer.activation.value})
            arrays[f"K_{i}"] = layer.K
            arrays[f"a_{i}"] = layer.a
            arrays[f"b_{i}"] = layer.b
        else:
            spec.append({"type": "psd", "direction": layer.direction})
            arrays[f"X_{i}"] = layer.weight.data
    arrays["spec"] = np.frombuffer(json.dumps({
        "layers": spec, "encoder_len": network.encoder_len,
        "full_dim": network.full_dim, "reduced_dim": network.reduced_dim,
    }).encode(), dtype=np.uint8)
    np.savez(path, **arrays)


def load_network(path):
    with np.load(path) as data:
        meta = json.loads(bytes(data["spec"].tobytes()).decode())
        layers = []
        for i, entry in enumerate(meta["layers"]):
            if entry["type"] == "gradient":
                layers.append(net.GradientLayer(
                    entry["kind"], entry["dim"], entry["upscale"],
                    data[f"K_{i}"], data[f"a_{i}"], data[f"b_{i}"],
                    net.Activation(entry["activation"])))
            else:
                layers.append(net.PSDLayer(st.StiefelPoint(data[f"X_{i}"]),
                                           entry["direction"]))
    return net.Network(layers=layers, encoder_len=meta["encoder_len"],
                       full_dim=meta["full_dim"], reduced_dim=meta["reduced_dim"])


# -- evaluation -------------------------------------------------------------

def evaluate_run(cfg, run_dir, out_path):
    """errors.csv rows (n, param, e_red, e_proj, integration_seconds)."""
    run_dir = Path(run_dir)
    rows = []
    variant = "with_ref" if cfg.normalized else "no_ref"
    for n in cfg.n_range:
        network = load_network(run_dir / f"params_n{n}.npz")
        for param in (cfg.testing_params or cfg.params):
            sys_fom, x0 = fom_system_for(cfg, param)
            exact = implicit_midpoint(sys_fom, x0, cfg.t0, cfg.t1, cfg.time_steps)
            rom = red.build_rom(network.encode, network.decode,
                                network.decoder_jacobian, x0,
                                use_ref=cfg.normalized, normalized=cfg.normalized)
            t_start = time.perf_counter()
            try:
                reduced = red.solve_rom(rom, sys_fom, cfg.t0, cfg.t1, cfg.time_steps,
                                        tol=1e-10)
                seconds = time.perf_counter() - t_start
                e_red = red.reduction_error(variant, exact, rom, reduced)
            except SympmorError as exc:
                rows.append([n, param, "failed", "failed", f"{exc}"])
                continue
            e_proj = red.projection_error(
                variant, exact, network.encode, network.decode, x_ref=rom.x_ref)
            rows.append([n, param, e_red, e_proj, seconds])
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "param", "e_red", "e_proj", "integration_seconds"])
        writer.writerows(rows)
    return rows


def psd_baseline(cfg, snapshots, out_path):
    """PSD comparison: always unnormalized, no reference state."""
    if snapshots.normalized:
        raise SympmorError("PSD baseline requires unnormalized data")
    rows = []
    for n in cfg.n_range:
        X = red.psd_cotangent_lift(snapshots.data, n)
        encode, decode, jac = red.psd_maps(X)
        for param in (cfg.testing_params or cfg.params):
            sys_fom, x0 = fom_system_for(cfg, param)
            exact = implicit_midpoint(sys_fom, x0, cfg.t0, cfg.t1, cfg.time_steps)
            rom = red.build_rom(encode, decode, lambda xr: jac(xr), x0,
                                use_ref=False, normalized=False)
            t_start = time.perf_counter()
            reduced = red.solve_rom(rom, sys_fom, cfg.t0, cfg.t1, cfg.time_steps,
                                    tol=1e-10)
            seconds = time.perf_counter() - t_start
            e_red = red.reduction_error("no_ref", exact, rom, reduced)
            e_proj = red.projection_error("no_ref", exact, encode, decode)
            rows.append([n, param, e_red, e_proj, seconds])
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "param", "e_red", "e_proj", "integration_seconds"])
        writer.writerows(rows)
    return rows


# -- speed test -------------------------------------------------------------

def _time_median(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def speed_test(pairs, optimizers=("homogeneous", "stiefel_decay"), seed=0):
    """Timing rows (optimizer, N, n, seconds); one warm-up step before the median of 5."""
    rows = []
    for N, n in pairs:
        egrad = np.ones((N, n))
        for name in optimizers:
            X = st.random_stiefel(N, n, seed)
            if name == "homogeneous":
                hyper = opt.AdamHyper()
                cache = opt.HomogeneousAdamCache(N, n)
                state = {"X": X}

                def step(state=state, hyper=hyper, cache=cache):
                    state["X"] = opt.homogeneous_psd_update(
                        hyper, cache, state["X"], egrad, seed=hyper.t)
            else:
                decay = 0.9995 if name.endswith("decay") else None
                hyper = opt.AdamHyper(decay=decay)
                cache = opt.StiefelAdamCache(X)
                state = {"X": X}

                def step(state=state, hyper=hyper, cache=cache):
                    state["X"] = opt.stiefel_psd_update(
                        hyper, cache, state["X"], egrad,
                        MetricKind.Canonical, TransportKind.Submanifold)
            step()  # warm-up, excluded from the median
            rows.append([name, N, n, _time_median(step)])
    return rows


# -- report -----------------------------------------------------------------

def merge_reports(run_dirs, out_path):
    """Merge errors.csv files across runs into one CSV keyed by variant."""
    rows = []
    for run_dir in run_dirs:
        run_dir = Path(run_dir)
        manifest = {}
        mpath = run_dir / "manifest.json"
        if mpath.exists():
            manifest = json.loads(mpath.read_text())
        variant = manifest.get("config", {}).get("variant", run_dir.name)
        epath = run_dir / "errors.csv"
        if not epath.exists():
            raise SympmorError(f"missing errors.csv in {run_dir}")
        with open(epath, newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            for row in reader:
                rows.append([variant] + row)
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variant", "n", "param", "e_red", "e_proj",
                         "integration_seconds"])
        writer.writerows(rows)
    return rows


# -- argparse plumbing ------------------------------------------------------

def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def main(argv=None):
    parser = argparse.ArgumentParser(prog="sympmor")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name):
        p = sub.add_parser(name)
        p.add_argument("--config", required=name not in ("speed-test", "report", "normalize"))
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=".")
        return p

    add("generate-data")
    p = add("normalize")
    p.add_argument("--input", required=True)
    p = add("train")
    p.add_argument("--data", required=True)
    p = add("evaluate")
    p.add_argument("--run", required=True)
    p = add("psd")
    p.add_argument("--data", required=True)
    p = add("speed-test")
    p.add_argument("--pairs", default="2000x10,4000x10")
    p = add("report")
    p.add_argument("runs", nargs="+")

    args = parser.parse_args(argv)
    try:
        out = Path(args.out)
        if args.command == "generate-data":
            cfg = _load(args)
            snaps = generate_snapshots(cfg)
            out.mkdir(parents=True, exist_ok=True)
            write_snapshot_file(out / "snapshots.bin", snaps, model_id=cfg.model,
                                seed=cfg.seed)
            print(out / "snapshots.bin")
        elif args.command == "normalize":
            snaps, meta = read_snapshot_file(args.input)
            normed = red.normalize_snapshots(snaps)
            out.mkdir(parents=True, exist_ok=True)
            write_snapshot_file(out / "snapshots_normalized.bin", normed,
                                model_id=meta.get("model", ""), seed=meta.get("seed"))
            print(out / "snapshots_normalized.bin")
        elif args.command == "train":
            cfg = _load(args)
            snaps, _ = read_snapshot_file(args.data)
            if cfg.normalized and not snaps.normalized:
                snaps = red.normalize_snapshots(snaps)
            train_run(cfg, snaps, out)
            print(out)
        elif args.command == "evaluate":
            cfg = _load(args)
            out.mkdir(parents=True, exist_ok=True)
            evaluate_run(cfg, args.run, Path(args.run) / "errors.csv")
            print(Path(args.run) / "errors.csv")
        elif args.command == "psd":
            cfg = _load(args)
            snaps, _ = read_snapshot_file(args.data)
            out.mkdir(parents=True, exist_ok=True)
            psd_baseline(cfg, snaps, out / "psd_errors.csv")
            print(out / "psd_errors.csv")
        elif args.command == "speed-test":
            pairs = [tuple(int(v) for v in pair.split("x"))
                     for pair in args.pairs.split(",")]
            rows = speed_test(pairs, seed=args.seed or 0)
            out.mkdir(parents=True, exist_ok=True)
            with open(out / "speed.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["optimizer", "N", "n", "seconds"])
                writer.writerows(rows)
            print(out / "speed.csv")
        elif args.command == "report":
            out.mkdir(parents=True, exist_ok=True)
            merge_reports(args.runs, out / "report.csv")
            print(out / "report.csv")
    except SympmorError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
