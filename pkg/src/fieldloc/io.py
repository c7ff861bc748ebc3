"""File formats: CSV exports, the packed observation dump, the manifest.

All floats are printed with 17 significant digits so a written value
round-trips to the identical double; reruns with the same seed therefore
produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import struct
import time
from pathlib import Path

import numpy as np
import pandas as pd

from .deploy import Deployment
from .estimation import CumulantMatrix
from .fields import ObservationMatrix
from .graph import UNREACHABLE, HopDistanceTable, ProximityGraph
from .localization import LocalizationResult

FLOAT_FMT = "%.17g"


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


class DataError(RuntimeError):
    """An input file is missing or does not parse as expected."""


# ---------------------------------------------------------------- sensors


def write_sensors_csv(path, deployment: Deployment) -> None:
    is_beacon = deployment.is_beacon
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "x", "y", "is_beacon"])
        for i, (x, y) in enumerate(deployment.positions):
            w.writerow([i, _fmt(x), _fmt(y), int(is_beacon[i])])


def read_sensors_csv(path) -> Deployment:
    frame = _read_csv(path, {"id", "x", "y", "is_beacon"})
    frame = frame.sort_values("id")
    if not np.array_equal(frame["id"].to_numpy(), np.arange(len(frame))):
        raise DataError(f"{path}: sensor ids must be 0..n-1")
    positions = frame[["x", "y"]].to_numpy(dtype=np.float64)
    beacon_ids = frame.index.to_numpy()[frame["is_beacon"].to_numpy() == 1]
    return Deployment(positions, np.asarray(beacon_ids, dtype=np.int64))


# ----------------------------------------------------------- observations


def write_observations_bin(path, obs: ObservationMatrix) -> None:
    """Header: n_sensors, n_steps as little-endian uint64; then one packed
    row per sensor, ceil(n_steps/8) bytes, LSB-first within each byte."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<QQ", obs.n_sensors, obs.n_steps))
        fh.write(obs.packed.tobytes())


def read_observations_bin(path) -> ObservationMatrix:
    raw = Path(path).read_bytes()
    if len(raw) < 16:
        raise DataError(f"{path}: truncated header")
    n, t = struct.unpack_from("<QQ", raw)
    row_bytes = (t + 7) // 8
    expected = 16 + n * row_bytes
    if len(raw) != expected:
        raise DataError(f"{path}: expected {expected} bytes, found {len(raw)}")
    packed = np.frombuffer(raw, dtype=np.uint8, offset=16).reshape(int(n), row_bytes).copy()
    return ObservationMatrix(int(n), int(t), packed)


# -------------------------------------------------------------- cumulants


def write_cumulants_csv(path, cm: CumulantMatrix) -> None:
    """All unordered pairs, i < j in lexicographic order."""
    n = cm.n_sensors
    iu, ju = np.triu_indices(n, k=1)
    frame = pd.DataFrame(
        {
            "i": iu,
            "j": ju,
            "kappa": cm.kappa[iu, ju],
            "c2": cm.c2[iu, ju],
            "c2_lagged": cm.c2_lagged[iu, ju] if cm.c2_lagged is not None else np.nan,
        }
    )
    frame.to_csv(path, index=False, float_format=FLOAT_FMT, na_rep="", lineterminator="\n")


def read_cumulants_csv(path) -> tuple[np.ndarray, np.ndarray | None]:
    """Reconstruct the symmetric c2 and lagged matrices (diagonal zero)."""
    frame = _read_csv(path, {"i", "j", "kappa", "c2", "c2_lagged"})
    i = frame["i"].to_numpy(dtype=np.int64)
    j = frame["j"].to_numpy(dtype=np.int64)
    n = int(max(i.max(), j.max())) + 1 if len(frame) else 0
    c2 = np.zeros((n, n))
    c2[i, j] = c2[j, i] = frame["c2"].to_numpy(dtype=np.float64)
    lag_col = frame["c2_lagged"]
    if lag_col.isna().all():
        lagged = None
    else:
        lagged = np.zeros((n, n))
        lagged[i, j] = lagged[j, i] = lag_col.to_numpy(dtype=np.float64)
    return c2, lagged


# ------------------------------------------------------------------ graph


def write_graph_csv(path, graph: ProximityGraph) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j"])
        for i, j in graph.edges:
            w.writerow([int(i), int(j)])


def read_graph_csv(path, n_nodes: int) -> ProximityGraph:
    frame = _read_csv(path, {"i", "j"})
    edges = frame[["i", "j"]].to_numpy(dtype=np.int64)
    return ProximityGraph(n_nodes=n_nodes, edges=edges, kind="loaded")


# ------------------------------------------------------------------- hops


def write_hops_csv(path, table: HopDistanceTable, estimates: np.ndarray) -> None:
    """Rows (beacon, node); unreachable nodes keep hops=-1, empty estimate."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["beacon_id", "node_id", "hops", "estimated_distance"])
        for s_idx, source in enumerate(table.sources):
            for node in range(table.hops.shape[1]):
                h = int(table.hops[s_idx, node])
                est = "" if h == UNREACHABLE else _fmt(estimates[s_idx, node])
                w.writerow([int(source), node, h, est])


def read_hops_csv(path) -> tuple[HopDistanceTable, np.ndarray]:
    frame = _read_csv(path, {"beacon_id", "node_id", "hops", "estimated_distance"})
    sources = frame["beacon_id"].unique()
    n_nodes = int(frame["node_id"].max()) + 1
    hops = np.full((sources.size, n_nodes), UNREACHABLE, dtype=np.int64)
    estimates = np.full((sources.size, n_nodes), np.nan)
    src_index = {int(s): idx for idx, s in enumerate(sources)}
    for row in frame.itertuples(index=False):
        s = src_index[int(row.beacon_id)]
        hops[s, int(row.node_id)] = int(row.hops)
        if not pd.isna(row.estimated_distance):
            estimates[s, int(row.node_id)] = float(row.estimated_distance)
    return HopDistanceTable(np.asarray(sources, dtype=np.int64), hops), estimates


# -------------------------------------------------------------- positions


def write_positions_csv(path, result: LocalizationResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "true_x", "true_y", "est_x", "est_y", "error", "interior", "unlocalized"])
        for node in result.nodes:
            if node.estimated_position is None:
                est_x = est_y = err = ""
            else:
                est_x = _fmt(node.estimated_position.x)
                est_y = _fmt(node.estimated_position.y)
                err = _fmt(node.error)
            w.writerow(
                [
                    node.node_id,
                    _fmt(node.true_position.x),
                    _fmt(node.true_position.y),
                    est_x,
                    est_y,
                    err,
                    int(node.interior),
                    int(not node.localized),
                ]
            )


# ---------------------------------------------------------------- scatter


def write_scatter_csv(path, rows) -> None:
    """Rows of (i, j, distance, c2)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "distance", "c2"])
        for i, j, dist, value in rows:
            w.writerow([int(i), int(j), _fmt(dist), _fmt(value)])


# ------------------------------------------------------- covariance curve


def write_covariance_curve_csv(path, curves: dict) -> None:
    """`curves` maps a source label (analytic/montecarlo/empirical) to a
    CovarianceCurve; rows are grouped by source in the given order."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["distance", "value", "stderr", "source"])
        for source, curve in curves.items():
            for d, v, s in zip(curve.distances, curve.values, curve.stderr):
                w.writerow([_fmt(d), _fmt(v), _fmt(s), source])


# ----------------------------------------------------------------- traces


def write_traces_csv(path, trajectory: np.ndarray) -> None:
    """Walker trajectory (n_steps, n_walkers, 2) as rows step,walker,x,y."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "walker", "x", "y"])
        for t in range(trajectory.shape[0]):
            for wlk in range(trajectory.shape[1]):
                x, y = trajectory[t, wlk]
                w.writerow([t, wlk, _fmt(x), _fmt(y)])


# --------------------------------------------------------------- manifest


def file_checksum(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def update_manifest(out_dir, stage: str, config_echo: dict, files: list, elapsed: float) -> None:
    """Merge one stage's record into <out_dir>/manifest.json."""
    out_dir = Path(out_dir)
    manifest_path = out_dir / "manifest.json"
    manifest = {}
    if manifest_path.exists():
        try:
            manifest = json.loads(manifest_path.read_text())
        except json.JSONDecodeError:
            manifest = {}
    manifest.setdefault("config", config_echo)
    manifest.setdefault("seed", config_echo.get("seed"))
    stages = manifest.setdefault("stages", {})
    stages[stage] = {
        "files": {Path(f).name: file_checksum(f) for f in files},
        "elapsed_seconds": elapsed,
        "finished_at": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# ------------------------------------------------------------------ misc


def _read_csv(path, required_columns: set) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: file not found")
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except Exception as exc:
        raise DataError(f"{path}: failed to parse CSV: {exc}") from exc
    missing = required_columns - set(frame.columns)
    if missing:
        raise DataError(f"{path}: missing column(s) {sorted(missing)}")
    return frame
