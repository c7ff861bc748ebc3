"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Statistical thresholds marked "calibrated" were pinned from the 10-seed
runs reproduced by tools/calibrate.py; the calibration values are quoted
next to each assertion. Run with `pytest -s tests/test_acceptance.py` to
see the per-criterion lines.
"""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest
from scipy import integrate, stats

import fieldloc as fl
from fieldloc.cli import main as cli_main
from fieldloc.io import file_checksum, read_observations_bin

SIZES = (500, 1000, 2000)
MC_DISTANCES = (0.0, 0.05, 0.1, 0.2, 0.3, 0.45)


@contextmanager
def criterion(number, title, budget_s):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[criterion {number}] FAIL: {title} ({time.perf_counter() - start:.1f}s)")
        raise
    elapsed = time.perf_counter() - start
    assert elapsed < budget_s, f"criterion {number} exceeded its {budget_s}s budget: {elapsed:.1f}s"
    print(f"[criterion {number}] PASS: {title} ({elapsed:.1f}s)")


def standard_run(seed, field, lag_window=0):
    rng = fl.RngStream.from_seed(seed)
    d = fl.place_beacons(fl.deploy_sensors(1000, rng.substream("deploy")), "corners")
    obs = fl.generate_observations(d, field, 2000, rng.substream("field"), 4)
    return d, fl.cumulant_matrix(obs, lag_window)


@pytest.fixture(scope="module")
def round_run():
    return standard_run(1, fl.BooleanClouds())


@pytest.fixture(scope="module")
def half_plane_run():
    return standard_run(1, fl.BigClouds(variant="half_plane"))


def pairwise_scatter(d, values):
    iu, ju = np.triu_indices(d.n_nodes, k=1)
    dist = np.linalg.norm(d.positions[iu] - d.positions[ju], axis=1)
    return dist, values[iu, ju]


# --------------------------------------------------------------- criterion 1


def lens_area_by_slices(dist, radius):
    def chord(x):
        h = radius**2 - max((x + dist / 2) ** 2, (x - dist / 2) ** 2)
        return 2.0 * math.sqrt(h) if h > 0 else 0.0

    if dist >= 2 * radius:
        return 0.0
    value, _ = integrate.quad(chord, dist / 2 - radius, radius - dist / 2, epsabs=1e-10, limit=300)
    return value


def test_criterion_1_lens_area_against_integration_oracle():
    with criterion(1, "lens area matches slice-integration oracle to 1e-6 at 50 pairs", 60):
        gen = fl.RngStream.from_seed(101).generator
        for _ in range(50):
            radius = float(gen.uniform(0.05, 1.2))
            dist = float(gen.uniform(0.0, 2.4 * radius))
            assert abs(fl.lens_area(dist, radius) - lens_area_by_slices(dist, radius)) < 1e-6


# --------------------------------------------------------------- criterion 2


def test_criterion_2_boolean_covariance_vs_montecarlo():
    with criterion(2, "disk-field covariance matches 1e6-sample Monte Carlo at 6 distances", 300):
        model = fl.BooleanClouds()
        assert fl.boolean_covariance(0.45, model) == 0.0
        rng = fl.RngStream.from_seed(102)
        for idx, dist in enumerate(MC_DISTANCES):
            value, stderr = fl.montecarlo_covariance(model, dist, 1_000_000, rng.substream(idx))
            analytic = fl.boolean_covariance(dist, model)
            assert abs(value - analytic) < 3 * stderr, (dist, value, analytic, stderr)


# --------------------------------------------------------------- criterion 3


def test_criterion_3_estimator_convergence_trend():
    with criterion(3, "pair-cumulant error follows the 1/sqrt(T) trend over 100 seeds", 600):
        model = fl.BooleanClouds()
        target = fl.boolean_covariance(0.05, model)
        pair = fl.Deployment(np.array([[0.475, 0.5], [0.525, 0.5]]))
        medians = {}
        for t in (500, 2000, 8000):
            errs = []
            for seed in range(100):
                rng = fl.RngStream.from_seed(seed * 10 + t)
                obs = fl.generate_observations(pair, model, t, rng.substream("field"))
                dense = obs.dense()
                errs.append(abs(fl.pair_cumulant(dense[0], dense[1]).c2 - target))
            medians[t] = float(np.median(errs))
        assert medians[500] > medians[2000] > medians[8000]
        r1 = medians[2000] / medians[500]
        r2 = medians[8000] / medians[2000]
        # calibrated values for this seed schedule: 0.480 and 0.543
        assert 0.35 <= r1 <= 0.72, medians
        assert 0.35 <= r2 <= 0.72, medians


# --------------------------------------------------------------- criterion 4


def test_criterion_4_cumulant_distance_rank_correlation(round_run, half_plane_run):
    """Monotone cumulant-distance scatter for both cloud models.

    Half-plane covariance decays over the full distance range, so its
    all-pairs rank correlation is near -1 (calibrated [-0.998, -0.996]).
    The disk field's covariance is identically zero beyond twice the
    maximal radius (0.4), which is ~64% of all pairs; with 2000-step
    records those pairs carry pure estimator noise (sd ~0.0046), so even a
    perfect estimator cannot push the all-pairs rank correlation past
    about -0.56 (noise-free mid-rank limit: -0.855). The calibrated
    all-pairs band is [-0.564, -0.495] and the monotone structure lives in
    the correlated range, calibrated [-0.925, -0.914] for pairs under 0.4.
    """
    with criterion(4, "cumulant vs distance rank correlation (round + half-plane)", 1200):
        d, cm = half_plane_run
        dist, vals = pairwise_scatter(d, cm.c2)
        rho_hp = stats.spearmanr(vals, dist).statistic
        assert rho_hp <= -0.8, rho_hp

        d, cm = round_run
        dist, vals = pairwise_scatter(d, cm.c2)
        rho_round = stats.spearmanr(vals, dist).statistic
        assert rho_round <= -0.45, rho_round  # calibrated
        near = dist < 0.4
        rho_near = stats.spearmanr(vals[near], dist[near]).statistic
        assert rho_near <= -0.85, rho_near  # calibrated


# --------------------------------------------------------------- criterion 5


def test_criterion_5_proximity_graph_recall(round_run, half_plane_run):
    with criterion(5, "top-10 cumulant graph recovers the true 10-NN graph", 1200):
        for d, cm in (round_run, half_plane_run):
            g = fl.build_proximity_graph(cm, 10)
            quality = fl.knn_quality(g, d, 10)
            # calibrated recall: round [0.948, 0.956], half-plane [0.909, 0.922]
            assert quality.recall >= 0.85, quality

        # exact equivalence on small instances under a synthetic monotone score
        for seed in range(5):
            dep = fl.deploy_sensors(50, fl.RngStream.from_seed(seed))
            diff = dep.positions[:, None, :] - dep.positions[None, :, :]
            scores = 1.0 - np.sqrt((diff**2).sum(-1))
            g = fl.build_proximity_graph(scores, k=4)
            assert np.array_equal(g.edges, fl.true_knn_edges(dep.positions, 4))
            assert fl.knn_quality(g, dep, 4).recall == 1.0


# --------------------------------------------------------------- criterion 6


def test_criterion_6_hop_scaling_trend():
    """Hop-count distance estimates sharpen as the network grows.

    Within each seed the three network sizes share one point pool (the
    smaller deployments are prefixes of the larger) and one set of 100
    probe pairs, so the comparison isolates the size effect instead of
    re-rolling all geometry noise per size.
    """
    with criterion(6, "median |hops*r - d| decreases across sizes for >= 8/10 seeds", 300):
        monotone = 0
        for seed in range(1, 11):
            rng = fl.RngStream.from_seed(seed)
            pool = fl.deploy_sensors(max(SIZES), rng.substream("deploy"))
            gen = rng.substream("pairs").generator
            a = gen.integers(0, min(SIZES), 100)
            b = gen.integers(0, min(SIZES), 100)
            keep = a != b
            a, b = a[keep], b[keep]
            medians = []
            for n in SIZES:
                dep = fl.Deployment(pool.positions[:n])
                radius = fl.geometric_radius(n, 1.2)
                g = fl.build_geometric_graph(dep, radius)
                table = fl.hop_distances(g, np.unique(a))
                row = {int(s): i for i, s in enumerate(table.sources)}
                errs = []
                for i, j in zip(a, b):
                    hops = table.hops[row[int(i)], j]
                    if hops >= 0:
                        true = np.linalg.norm(dep.positions[i] - dep.positions[j])
                        errs.append(abs(hops * radius - true))
                medians.append(float(np.median(errs)))
            monotone += medians[0] > medians[1] > medians[2]
        assert monotone >= 8, monotone  # calibrated: 10/10


# --------------------------------------------------------------- criterion 7


def run_end_to_end(seed):
    d, cm = standard_run(seed, fl.BooleanClouds())
    k = fl.compute_kn(d.n_nodes, 1.2)
    g = fl.build_proximity_graph(cm, k)
    table = fl.hop_distances(g, d.beacon_ids)
    return fl.error_report(fl.localize_all(d, table, d.n_nodes, k), d)


@pytest.fixture(scope="module")
def end_to_end_reports():
    return [run_end_to_end(seed) for seed in range(1, 11)]


def test_criterion_7_end_to_end_coverage_and_interior_error(end_to_end_reports):
    with criterion(7, "full pipeline localizes >=95% with interior median <= 0.09", 900):
        for rep in end_to_end_reports:
            assert rep.localized_fraction >= 0.95, rep
            # calibrated interior medians over 10 seeds: [0.0304, 0.0676]
            assert rep.interior_median <= 0.09, rep


def test_criterion_7_boundary_split(end_to_end_reports):
    """Interior nodes should beat boundary nodes in >= 9 of 10 seeds.

    This encodes an expected strong boundary artifact. In this
    implementation the hop-distance estimates are unbiased (the field is
    simulated without edge bias and the solver is a proper least-squares
    fit), so boundary degradation is mild: calibration over 20 seeds
    found interior < boundary in 14/20 with a mean gap of +0.007, i.e. a
    ~70% per-seed rate, and the 10 fixed seeds here give 6/10. The
    criterion is asserted as specified and is expected to fail; see the
    calibration notes.
    """
    with criterion(7, "interior median below boundary median for >= 9/10 seeds", 900):
        splits = sum(rep.interior_median < rep.boundary_median for rep in end_to_end_reports)
        assert splits >= 9, [
            (round(rep.interior_median, 4), round(rep.boundary_median, 4))
            for rep in end_to_end_reports
        ]


# --------------------------------------------------------------- criterion 8


def test_criterion_8_walker_fixed_node_scatter():
    with criterion(8, "walker lagged cumulants rank distances from reference nodes", 900):
        d, cm = standard_run(1, fl.RandomWalkers(), lag_window=2)
        interior = np.all((d.positions > 0.2) & (d.positions < 0.8), axis=1)
        idx = np.flatnonzero(interior)
        order = np.argsort(cm.means[idx])
        high_node = int(idx[order[int(len(idx) * 0.9)]])
        low_node = int(idx[order[int(len(idx) * 0.1)]])
        for node in (high_node, low_node):
            others = np.array([v for v in range(d.n_nodes) if v != node])
            dist = np.linalg.norm(d.positions[others] - d.positions[node], axis=1)
            rho = stats.spearmanr(cm.c2_lagged[node, others], dist).statistic
            # calibrated over 10 seeds: worst -0.509; this seed: -0.711 / -0.859
            assert rho <= -0.5, (node, rho)
            assert cm.c2_lagged[node, node] > 0.0


# --------------------------------------------------------------- criterion 9


def test_criterion_9_determinism_and_throughput(tmp_path):
    with criterion(9, "thread count never changes bytes; cumulant stage under 60s", 900):
        config = {
            "seed": 4242,
            "n_sensors": 1000,
            "beacons": "corners",
            "field": {"kind": "boolean_clouds", "intensity": 30.0, "radius_min": 0.0, "radius_max": 0.2},
            "n_steps": 2000,
            "knn_exponent": 1.2,
            "lag_window": 0,
            "output_dir": "",
        }
        checks = {}
        for threads in (1, 8):
            out = tmp_path / f"threads{threads}"
            config["output_dir"] = str(out)
            cfg_path = tmp_path / f"config{threads}.json"
            cfg_path.write_text(json.dumps(config))
            assert cli_main(["pipeline", "--config", str(cfg_path), "--threads", str(threads)]) == 0
            checks[threads] = {
                name: file_checksum(out / name)
                for name in ("sensors.csv", "cumulants.csv", "graph.csv", "hops.csv", "positions.csv")
            }
        assert checks[1] == checks[8]

        obs = read_observations_bin(tmp_path / "threads1" / "observations.bin")
        start = time.perf_counter()
        fl.cumulant_matrix(obs)
        assert time.perf_counter() - start < 60.0
