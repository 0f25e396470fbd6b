"""Binary snapshot file format.

Header (little-endian): magic "SMOR", format version u32, rows u64, cols u64,
n_params u64, K u64, normalized u8.  Payload: rows*cols float64 values in
column-major order.  A JSON sidecar at <path>.meta.json carries parameter
values, time bounds, model id, and seed.
"""

import json
import struct
from pathlib import Path

import numpy as np

from .errors import SympmorError
from .reduction import SnapshotSet

MAGIC = b"SMOR"
VERSION = 1
_HEADER = struct.Struct("<4sIQQQQB")


def write_snapshot_file(path, snapshots, model_id="", seed=None, extra=None):
    path = Path(path)
    data = np.asarray(snapshots.data, dtype="<f8")
    rows, cols = data.shape
    header = _HEADER.pack(MAGIC, VERSION, rows, cols, len(snapshots.params),
                          snapshots.K, 1 if snapshots.normalized else 0)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.asfortranarray(data).tobytes(order="F"))
    meta = {
        "params": [float(p) for p in snapshots.params],
        "t0": snapshots.t0,
        "t1": snapshots.t1,
        "model": model_id,
        "seed": seed,
    }
    if snapshots.initial_states is not None:
        meta["initial_states"] = snapshots.initial_states.tolist()
    if extra:
        meta.update(extra)
    with open(str(path) + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
    return path


def read_snapshot_file(path):
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        magic, version, rows, cols, n_params, K, normalized = _HEADER.unpack(head)
        if magic != MAGIC:
            raise SympmorError(f"not a snapshot file: bad magic {magic!r}")
        if version != VERSION:
            raise SympmorError(f"unsupported format version {version}")
        payload = fh.read(rows * cols * 8)
    if len(payload) != rows * cols * 8:
        raise SympmorError("truncated payload")
    data = np.frombuffer(payload, dtype="<f8").reshape((rows, cols), order="F").copy()
    meta_path = Path(str(path) + ".meta.json")
    meta = {}
    if meta_path.exists():
        meta = json.loads(meta_path.read_text())
    inits = None
    if "initial_states" in meta:
        inits = np.asarray(meta["initial_states"], dtype=float)
    return SnapshotSet(
        data=data,
        params=meta.get("params", [float("nan")] * n_params),
        K=K,
        t0=meta.get("t0", 0.0),
        t1=meta.get("t1", 1.0),
        normalized=bool(normalized),
        initial_states=inits,
    ), meta
