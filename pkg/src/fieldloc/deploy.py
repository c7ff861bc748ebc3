"""Sensor deployment in the unit square and beacon placement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from ._validation import check_positions, check_positive_int, check_rng

CORNERS = "corners"

_CORNER_POINTS = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0))


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Deployment:
    """Node positions in the unit square, in generation order.

    Beacons are ordinary nodes whose positions are known to the solver;
    they observe the field like every other node and broadcast nothing.
    """

    positions: np.ndarray
    beacon_ids: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    def __post_init__(self):
        pos = check_positions(self.positions)
        if pos.shape[0] < 1:
            raise ValueError("a deployment needs at least one node")
        if np.any(pos < 0.0) or np.any(pos > 1.0):
            raise ValueError("node positions must lie inside the unit square")
        ids = np.asarray(self.beacon_ids, dtype=np.int64)
        if ids.ndim != 1:
            raise ValueError("beacon_ids must be a 1-D index list")
        if ids.size:
            if ids.min() < 0 or ids.max() >= pos.shape[0]:
                raise ValueError("beacon_ids out of range")
            if np.unique(ids).size != ids.size:
                raise ValueError("beacon_ids must be distinct")
        pos.setflags(write=False)
        ids.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "beacon_ids", ids)

    @property
    def n_nodes(self) -> int:
        return self.positions.shape[0]

    @property
    def n_beacons(self) -> int:
        return self.beacon_ids.size

    @property
    def is_beacon(self) -> np.ndarray:
        mask = np.zeros(self.n_nodes, dtype=bool)
        mask[self.beacon_ids] = True
        return mask

    @property
    def beacon_positions(self) -> np.ndarray:
        return self.positions[self.beacon_ids]

    def point(self, i: int) -> Point2:
        x, y = self.positions[i]
        return Point2(float(x), float(y))


def deploy_sensors(n: int, rng) -> Deployment:
    """Draw `n` node positions i.i.d. uniform on the unit square."""
    n = check_positive_int(n, "n")
    gen = check_rng(rng).generator
    positions = gen.uniform(0.0, 1.0, size=(n, 2))
    return Deployment(positions)


BeaconSpec = Union[str, Sequence[tuple[float, float]]]


def place_beacons(deployment: Deployment, spec: BeaconSpec) -> Deployment:
    """Append beacon nodes to a deployment.

    `spec` is either the token ``"corners"`` (one beacon on each corner of
    the unit square) or an explicit list of coordinates, appended verbatim.
    """
    if isinstance(spec, str):
        if spec != CORNERS:
            raise ValueError(f"unknown beacon spec {spec!r}; expected {CORNERS!r} or a coordinate list")
        coords = np.array(_CORNER_POINTS, dtype=np.float64)
    else:
        coords = np.asarray(list(spec), dtype=np.float64).reshape(-1, 2)
        if coords.size and (np.any(coords < 0.0) or np.any(coords > 1.0)):
            raise ValueError("explicit beacon coordinates must lie inside the unit square")
    if coords.shape[0] == 0:
        return deployment
    n0 = deployment.n_nodes
    positions = np.vstack([deployment.positions, coords])
    new_ids = np.arange(n0, n0 + coords.shape[0], dtype=np.int64)
    beacon_ids = np.concatenate([deployment.beacon_ids, new_ids])
    return Deployment(positions, beacon_ids)


def compute_kn(n: int, c: float) -> int:
    """Per-node neighbor count `floor((ln n)^c)`, clamped to at least 1.

    The natural logarithm is intentional: it is the only base for which the
    standard evaluation at n=1000, c=1.2 gives 10.
    """
    n = check_positive_int(n, "n")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    c = float(c)
    if not c > 1.0:
        raise ValueError(f"exponent c must be > 1, got {c}")
    return max(1, math.floor(math.log(n) ** c))
