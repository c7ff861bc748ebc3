import math

import numpy as np
import pytest

from fieldloc import (
    DegenerateGeometryError,
    Deployment,
    HopDistanceTable,
    RngStream,
    error_report,
    localize_all,
    multilaterate,
)
from fieldloc.graph import UNREACHABLE

CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])


def exact_distances(target, beacons=CORNERS):
    return np.linalg.norm(beacons - np.asarray(target), axis=1)


def grid_search_objective(beacons, dists, resolution=1e-3):
    """Brute-force oracle: best objective over a grid on the unit square."""
    xs = np.arange(0.0, 1.0 + resolution / 2, resolution)
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    total = np.zeros(pts.shape[0])
    for b, d in zip(beacons, dists):
        total += (np.linalg.norm(pts - b, axis=1) - d) ** 2
    return float(total.min())


def test_exact_center():
    fit = multilaterate(CORNERS, exact_distances([0.5, 0.5]))
    assert np.allclose(fit.position, [0.5, 0.5], atol=1e-9)
    assert fit.residual < 1e-9
    assert fit.converged


def test_exact_off_center():
    fit = multilaterate(CORNERS, exact_distances([0.3, 0.7]))
    assert np.allclose(fit.position, [0.3, 0.7], atol=1e-9)


def test_zero_noise_consistency_random_targets():
    gen = RngStream.from_seed(21).generator
    for _ in range(50):
        target = gen.random(2)
        beacons = gen.random((4, 2))
        if np.linalg.svd(beacons - beacons.mean(0), compute_uv=False)[-1] < 1e-3:
            continue
        fit = multilaterate(beacons, exact_distances(target, beacons))
        assert np.allclose(fit.position, target, atol=1e-9)


def test_perturbed_distances_beat_grid_oracle():
    gen = RngStream.from_seed(22).generator
    for trial in range(10):
        target = 0.2 + 0.6 * gen.random(2)
        dists = exact_distances(target) * (1 + 0.05 * (2 * gen.random(4) - 1))
        fit = multilaterate(CORNERS, dists)
        obj = float(
            ((np.linalg.norm(np.asarray(fit.position) - CORNERS, axis=1) - dists) ** 2).sum()
        )
        assert obj <= grid_search_objective(CORNERS, dists) + 1e-9


def test_rigid_motion_equivariance():
    gen = RngStream.from_seed(23).generator
    angle = 0.7
    rot = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    shift = np.array([0.15, -0.05])
    beacons = gen.random((5, 2))
    dists = exact_distances([0.4, 0.6], beacons) * (1 + 0.03 * (2 * gen.random(5) - 1))
    base = np.asarray(multilaterate(beacons, dists).position)
    moved = np.asarray(multilaterate(beacons @ rot.T + shift, dists).position)
    assert np.allclose(moved, base @ rot.T + shift, atol=1e-8)


def test_gauss_newton_never_worse_than_linear_init():
    from fieldloc.localization import _linear_init, _objective

    gen = RngStream.from_seed(24).generator
    for _ in range(30):
        beacons = gen.random((4, 2))
        if np.linalg.svd(beacons - beacons.mean(0), compute_uv=False)[-1] < 1e-3:
            continue
        dists = gen.random(4) * 1.2
        fit = multilaterate(beacons, dists)
        init_obj = _objective(_linear_init(beacons, dists), beacons, dists)
        assert fit.residual**2 <= init_obj + 1e-12


def test_collinear_beacons_rejected():
    line = np.array([[0.1, 0.1], [0.5, 0.5], [0.9, 0.9]])
    with pytest.raises(DegenerateGeometryError):
        multilaterate(line, np.array([0.1, 0.2, 0.3]))


def test_multilaterate_validation():
    with pytest.raises(ValueError):
        multilaterate(CORNERS[:2], np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        multilaterate(CORNERS, np.array([0.5, 0.5, 0.5, -0.1]))
    with pytest.raises(ValueError):
        multilaterate(CORNERS, np.array([0.5, 0.5]))


def _corner_deployment(extra_positions):
    positions = np.vstack([extra_positions, CORNERS])
    n_extra = len(extra_positions)
    return Deployment(positions, np.arange(n_extra, n_extra + 4))


def test_localize_all_beacons_keep_positions():
    d = _corner_deployment([[0.5, 0.5]])
    hops = HopDistanceTable(
        sources=d.beacon_ids,
        hops=np.array([[9, 0, 0, 0, 0], [9, 0, 0, 0, 0], [9, 0, 0, 0, 0], [9, 0, 0, 0, 0]]).T.reshape(4, 5) * 0
        + np.array([[9, 0, 17, 17, 25], [9, 17, 0, 25, 17], [9, 17, 25, 0, 17], [9, 25, 17, 17, 0]]),
    )
    res = localize_all(d, hops, n=1000, k=10)
    for node in res.nodes:
        if node.is_beacon:
            assert node.error == 0.0
            assert node.estimated_position == node.true_position


def test_localize_all_center_node():
    d = _corner_deployment([[0.5, 0.5]])
    # exact hop counts that scale to the true center distances
    scale = math.sqrt(10 / (math.pi * 1000))
    h = round(math.sqrt(0.5) / scale)
    hops = HopDistanceTable(
        sources=d.beacon_ids,
        hops=np.array([[h, 0, 17, 17, 25], [h, 17, 0, 25, 17], [h, 17, 25, 0, 17], [h, 25, 17, 17, 0]]),
    )
    res = localize_all(d, hops, n=1000, k=10)
    est = np.asarray(res.nodes[0].estimated_position)
    assert np.all((est >= 0.0) & (est <= 1.0))
    assert np.linalg.norm(est - [0.5, 0.5]) < 0.05


def test_localize_all_unreachable_flagged():
    d = _corner_deployment([[0.5, 0.5]])
    hops = HopDistanceTable(
        sources=d.beacon_ids,
        hops=np.array(
            [
                [UNREACHABLE, 0, 17, 17, 25],
                [UNREACHABLE, 17, 0, 25, 17],
                [5, 17, 25, 0, 17],
                [UNREACHABLE, 25, 17, 17, 0],
            ]
        ),
    )
    res = localize_all(d, hops, n=1000, k=10)
    node = res.nodes[0]
    assert not node.localized
    assert node.estimated_position is None
    assert res.n_unlocalized == 1


def test_error_report_exact_estimates():
    d = _corner_deployment([[0.4, 0.4], [0.7, 0.1]])
    scale = math.sqrt(10 / (math.pi * 1000))
    hops = np.zeros((4, 6), dtype=np.int64)
    for s, b in enumerate(d.beacon_positions):
        for node in range(6):
            hops[s, node] = round(np.linalg.norm(d.positions[node] - b) / scale)
    res = localize_all(d, HopDistanceTable(d.beacon_ids, hops), n=1000, k=10)
    rep = error_report(res, d)
    assert rep.n_nodes == 2
    assert rep.n_localized == 2
    assert rep.mean_error < 0.06  # rounding noise only
    assert rep.interior_median <= rep.mean_error + 0.06


def test_error_report_single_node_stats():
    d = _corner_deployment([[0.5, 0.5]])
    scale = math.sqrt(10 / (math.pi * 1000))
    h = round(math.sqrt(0.5) / scale)
    hops = HopDistanceTable(
        sources=d.beacon_ids,
        hops=np.array([[h, 0, 17, 17, 25], [h, 17, 0, 25, 17], [h, 17, 25, 0, 17], [h, 25, 17, 17, 0]]),
    )
    res = localize_all(d, hops, n=1000, k=10)
    rep = error_report(res, d)
    assert rep.mean_error == rep.median_error  # one localized non-beacon node
    assert rep.n_unlocalized == 0
