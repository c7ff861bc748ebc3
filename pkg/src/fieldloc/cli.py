"""Command-line pipeline: generate -> estimate -> graph -> localize,
plus scatter and covariance-oracle exports.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 missing or
corrupt data. All randomness flows from the single config seed (or its
--seed override); no stage draws ambient entropy, so reruns are
byte-identical and `pipeline` equals running the four stages separately.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .analytic import covariance_curve_analytic, covariance_curve_montecarlo
from .deploy import compute_kn, deploy_sensors, place_beacons
from .estimation import cumulant_matrix
from .fields import BooleanClouds, RandomWalkers, generate_observations, simulate_walkers
from .graph import build_proximity_graph, hop_distances, scale_hops
from .localization import error_report, localize_from_estimates
from .rng import RngStream
from .scenario import ConfigError, ScenarioConfig, config_to_dict, load_config

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DATA = 3


def _effective_config(args) -> ScenarioConfig:
    config = load_config(args.config)
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "out", None) is not None:
        updates["output_dir"] = str(args.out)
    if updates:
        from dataclasses import replace

        config = replace(config, **updates)
    return config


def _out_dir(config: ScenarioConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _n_threads(args) -> int:
    threads = getattr(args, "threads", None)
    if threads is None:
        return os.cpu_count() or 1
    if threads < 1:
        raise ConfigError(f"threads: must be >= 1, got {threads}")
    return threads


def run_generate(config: ScenarioConfig, n_threads: int = 1) -> list:
    out = _out_dir(config)
    root = RngStream.from_seed(config.seed)
    deployment = deploy_sensors(config.n_sensors, root.substream("deploy"))
    deployment = place_beacons(deployment, config.beacons)
    files = [out / "sensors.csv", out / "observations.bin"]
    io.write_sensors_csv(files[0], deployment)
    field_rng = root.substream("field")
    if isinstance(config.field, RandomWalkers):
        obs, trajectory = simulate_walkers(deployment, config.field, config.n_steps, field_rng)
        traces = out / "traces.csv"
        io.write_traces_csv(traces, trajectory)
        files.append(traces)
    else:
        obs = generate_observations(deployment, config.field, config.n_steps, field_rng, n_threads)
    io.write_observations_bin(out / "observations.bin", obs)
    return files


def run_estimate(config: ScenarioConfig) -> list:
    out = _out_dir(config)
    obs = io.read_observations_bin(out / "observations.bin")
    cm = cumulant_matrix(obs, config.lag_window)
    path = out / "cumulants.csv"
    io.write_cumulants_csv(path, cm)
    return [path]


def resolve_k(config: ScenarioConfig, n_nodes: int, override: int | None) -> int:
    if override is not None:
        if override < 1 or override >= n_nodes:
            raise ConfigError(f"k: must be in [1, n-1] = [1, {n_nodes - 1}], got {override}")
        return override
    return compute_kn(n_nodes, config.knn_exponent)


def run_graph(config: ScenarioConfig, k_override: int | None = None) -> list:
    out = _out_dir(config)
    deployment = io.read_sensors_csv(out / "sensors.csv")
    c2, lagged = io.read_cumulants_csv(out / "cumulants.csv")
    if c2.shape[0] != deployment.n_nodes:
        raise io.DataError("cumulants.csv does not match sensors.csv")
    use_lagged = config.lag_window > 0 and lagged is not None
    values = lagged if use_lagged else c2
    k = resolve_k(config, deployment.n_nodes, k_override)
    graph = build_proximity_graph(values, k)
    graph_path = out / "graph.csv"
    io.write_graph_csv(graph_path, graph)
    if deployment.n_beacons:
        table = hop_distances(graph, deployment.beacon_ids)
        estimates = scale_hops(table, deployment.n_nodes, k)
        hops_path = out / "hops.csv"
        io.write_hops_csv(hops_path, table, estimates)
        return [graph_path, hops_path]
    return [graph_path]


def run_localize(config: ScenarioConfig, interior_band: float = 0.2) -> list:
    out = _out_dir(config)
    deployment = io.read_sensors_csv(out / "sensors.csv")
    table, estimates = io.read_hops_csv(out / "hops.csv")
    result = localize_from_estimates(deployment, table.sources, estimates, interior_band)
    path = out / "positions.csv"
    io.write_positions_csv(path, result)
    report = error_report(result, deployment)
    print(
        f"localized {report.n_localized}/{report.n_nodes} nodes; "
        f"median error {report.median_error:.4f} "
        f"(interior {report.interior_median:.4f}, boundary {report.boundary_median:.4f})"
    )
    return [path]


def run_scatter(config: ScenarioConfig, fixed_node: int | None, use_lagged: bool) -> list:
    out = _out_dir(config)
    deployment = io.read_sensors_csv(out / "sensors.csv")
    c2, lagged = io.read_cumulants_csv(out / "cumulants.csv")
    if use_lagged:
        if lagged is None:
            raise ConfigError("use_lagged: cumulants.csv holds no lagged values")
        values = lagged
    else:
        values = c2
    pos = deployment.positions
    n = deployment.n_nodes
    rows = []
    if fixed_node is None:
        iu, ju = np.triu_indices(n, k=1)
    else:
        if not 0 <= fixed_node < n:
            raise ConfigError(f"fixed_node: must be in [0, {n - 1}], got {fixed_node}")
        others = np.array([v for v in range(n) if v != fixed_node], dtype=np.int64)
        iu = np.minimum(fixed_node, others)
        ju = np.maximum(fixed_node, others)
    dist = np.linalg.norm(pos[iu] - pos[ju], axis=1)
    rows = zip(iu.tolist(), ju.tolist(), dist.tolist(), values[iu, ju].tolist())
    path = out / "scatter.csv"
    io.write_scatter_csv(path, rows)
    return [path]


def run_oracle(config: ScenarioConfig, distances: list, n_samples: int) -> list:
    out = _out_dir(config)
    if not distances:
        raise ConfigError("distances: at least one distance is required")
    if sorted(set(distances)) != list(distances):
        raise ConfigError("distances: must be strictly increasing")
    rng = RngStream.from_seed(config.seed).substream("oracle")
    curves = {}
    if isinstance(config.field, BooleanClouds):
        curves["analytic"] = covariance_curve_analytic(config.field, distances)
    curves["montecarlo"] = covariance_curve_montecarlo(config.field, distances, n_samples, rng)
    path = out / "covariance_curve.csv"
    io.write_covariance_curve_csv(path, curves)
    return [path]


def _stage(args, name: str, runner) -> int:
    config = _effective_config(args)
    start = time.perf_counter()
    files = runner(config)
    elapsed = time.perf_counter() - start
    io.update_manifest(_out_dir(config), name, config_to_dict(config), files, elapsed)
    print(f"{name}: wrote {', '.join(Path(f).name for f in files)} ({elapsed:.2f}s)")
    return EXIT_OK


def cmd_generate(args) -> int:
    return _stage(args, "generate", lambda c: run_generate(c, _n_threads(args)))


def cmd_estimate(args) -> int:
    return _stage(args, "estimate", run_estimate)


def cmd_graph(args) -> int:
    return _stage(args, "graph", lambda c: run_graph(c, args.k))


def cmd_localize(args) -> int:
    return _stage(args, "localize", lambda c: run_localize(c, args.interior_band))


def cmd_scatter(args) -> int:
    return _stage(args, "scatter", lambda c: run_scatter(c, args.fixed_node, args.use_lagged))


def cmd_oracle(args) -> int:
    distances = _parse_distances(args.distances)
    return _stage(args, "oracle", lambda c: run_oracle(c, distances, args.n_samples))


def cmd_pipeline(args) -> int:
    config = _effective_config(args)
    n_threads = _n_threads(args)
    for name, runner in (
        ("generate", lambda c: run_generate(c, n_threads)),
        ("estimate", run_estimate),
        ("graph", lambda c: run_graph(c, args.k)),
        ("localize", lambda c: run_localize(c, args.interior_band)),
    ):
        start = time.perf_counter()
        files = runner(config)
        elapsed = time.perf_counter() - start
        io.update_manifest(_out_dir(config), name, config_to_dict(config), files, elapsed)
        print(f"{name}: wrote {', '.join(Path(f).name for f in files)} ({elapsed:.2f}s)")
    return EXIT_OK


def _parse_distances(text: str) -> list:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"distances: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fieldloc",
        description="Silent-sensor localization pipeline over simulated background fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="scenario JSON document")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--threads", type=int, default=None, help="worker pool size")

    p = sub.add_parser("generate", help="deploy sensors and synthesize observations")
    common(p)
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("estimate", help="pairwise cumulants from observations")
    common(p)
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("graph", help="proximity graph and beacon hop distances")
    common(p)
    p.add_argument("--k", type=int, default=None, help="per-node neighbor count (default floor((ln n)^c))")
    p.set_defaults(fn=cmd_graph)

    p = sub.add_parser("localize", help="multilaterate node positions from hops")
    common(p)
    p.add_argument("--interior-band", type=float, default=0.2)
    p.set_defaults(fn=cmd_localize)

    p = sub.add_parser("scatter", help="cumulant vs distance export")
    common(p)
    p.add_argument("--fixed-node", type=int, default=None, help="restrict to pairs containing this node")
    p.add_argument("--use-lagged", action="store_true", help="export lagged cumulants")
    p.set_defaults(fn=cmd_scatter)

    p = sub.add_parser("oracle", help="analytic + Monte Carlo covariance curve")
    common(p)
    p.add_argument("--distances", required=True, help="comma-separated distances")
    p.add_argument("--n-samples", type=int, default=100_000)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("pipeline", help="generate, estimate, graph, localize in sequence")
    common(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--interior-band", type=float, default=0.2)
    p.set_defaults(fn=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (io.DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
