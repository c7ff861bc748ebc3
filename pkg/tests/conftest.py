import numpy as np
import pytest

from fieldloc import BooleanClouds, Deployment, RngStream, deploy_sensors, place_beacons


@pytest.fixture
def rng():
    return RngStream.from_seed(1234)


@pytest.fixture
def small_deployment(rng):
    return place_beacons(deploy_sensors(40, rng.substream("deploy")), "corners")


@pytest.fixture
def probe_pair():
    """Two nodes 0.05 apart in the middle of the square."""
    return Deployment(np.array([[0.475, 0.5], [0.525, 0.5]]))


@pytest.fixture
def round_clouds():
    return BooleanClouds()
