import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from fieldloc import (
    BooleanClouds,
    CumulantAffinity,
    CumulantLocalizer,
    ObservationMatrix,
    RngStream,
    cumulant_matrix,
    deploy_sensors,
    generate_observations,
    place_beacons,
)


@pytest.fixture(scope="module")
def sim():
    rng = RngStream.from_seed(77)
    d = place_beacons(deploy_sensors(150, rng.substream("deploy")), "corners")
    obs = generate_observations(d, BooleanClouds(), 1500, rng.substream("field"))
    return d, obs.dense()


def test_affinity_matches_functional_path(sim):
    _, X = sim
    out = CumulantAffinity().fit_transform(X)
    cm = cumulant_matrix(ObservationMatrix.from_dense(X))
    assert np.array_equal(out, cm.c2)


def test_affinity_lagged(sim):
    _, X = sim
    out = CumulantAffinity(lag_window=2).fit_transform(X)
    cm = cumulant_matrix(ObservationMatrix.from_dense(X), lag_window=2)
    assert np.array_equal(out, cm.c2_lagged)


def test_affinity_get_set_params():
    est = CumulantAffinity(lag_window=3)
    assert est.get_params() == {"lag_window": 3}
    est.set_params(lag_window=1)
    assert est.lag_window == 1
    assert clone(est).lag_window == 1


def test_affinity_rejects_non_binary():
    with pytest.raises(ValueError):
        CumulantAffinity().fit_transform(np.array([[0, 2, 1]]))


def anchor_targets(deployment):
    y = np.full((deployment.n_nodes, 2), np.nan)
    y[deployment.beacon_ids] = deployment.positions[deployment.beacon_ids]
    return y


def test_localizer_end_to_end(sim):
    d, X = sim
    loc = CumulantLocalizer()
    positions = loc.fit_predict(X, anchor_targets(d))
    assert positions.shape == (d.n_nodes, 2)
    assert loc.localized_.all()
    # anchors keep their coordinates exactly
    assert np.array_equal(positions[d.beacon_ids], d.positions[d.beacon_ids])
    # a sensible overall error at this small scale
    err = np.linalg.norm(positions - d.positions, axis=1)
    assert np.median(err[~d.is_beacon]) < 0.25


def test_localizer_score_is_negative_median_error(sim):
    d, X = sim
    loc = CumulantLocalizer().fit(X, anchor_targets(d))
    score = loc.score(X, d.positions)
    err = np.linalg.norm(loc.positions_[~d.is_beacon] - d.positions[~d.is_beacon], axis=1)
    assert score == -float(np.median(err))


def test_localizer_explicit_neighbor_count(sim):
    d, X = sim
    loc = CumulantLocalizer(n_neighbors=7).fit(X, anchor_targets(d))
    assert loc.n_neighbors_ == 7
    default = CumulantLocalizer().fit(X, anchor_targets(d))
    assert default.n_neighbors_ == 6  # floor((ln 154)^1.2) = floor(6.96)


def test_localizer_requires_three_anchors(sim):
    d, X = sim
    y = np.full((d.n_nodes, 2), np.nan)
    y[0] = [0.0, 0.0]
    y[1] = [1.0, 1.0]
    with pytest.raises(ValueError):
        CumulantLocalizer().fit(X, y)


def test_localizer_predict_requires_fit():
    with pytest.raises(NotFittedError):
        CumulantLocalizer().predict()


def test_localizer_clone_and_params_roundtrip():
    loc = CumulantLocalizer(n_neighbors=5, lag_window=2, interior_band=0.1)
    params = loc.get_params()
    assert params["n_neighbors"] == 5
    assert params["lag_window"] == 2
    other = clone(loc)
    assert other.get_params() == params
