"""Background random fields and the binary observation matrix.

Three field models drive the simulator: a union-of-random-disks coverage
process, unbounded "big cloud" sets (isotropic half-planes or strip
processes), and moving point sources sensed within a radius ("walkers").
Each node records 1 when the field covers its position, 0 otherwise, at
discrete synchronized steps.

Cloud realizations at distinct steps are independent and drawn from
per-step substreams, so any generation schedule (serial, threaded, or a
single step in isolation) produces bit-identical columns. The walker
field is a single trajectory and keeps its temporal dependence.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Union

import numpy as np

from ._validation import check_positive_int, check_rng
from .deploy import Deployment
from .rng import RngStream

HALF_PLANE = "half_plane"
STRIPS = "strips"

# Smallest symmetric offset interval for which every line through the unit
# square is reachable at every orientation.
_HALF_PLANE_OFFSET = math.sqrt(2.0) / 2.0
_SQUARE_CENTER = np.array([0.5, 0.5])


@dataclass(frozen=True)
class BooleanClouds:
    """Poisson field of opaque disks with i.i.d. uniform radii.

    Centers are drawn on the unit square extended by `margin` on all sides
    so that coverage statistics are free of boundary bias; `margin` must be
    at least `radius_max` for that to hold.
    """

    intensity: float = 30.0
    radius_min: float = 0.0
    radius_max: float = 0.2
    margin: float | None = None

    def __post_init__(self):
        if self.intensity < 0:
            raise ValueError(f"intensity must be >= 0, got {self.intensity}")
        if self.radius_min < 0:
            raise ValueError(f"radius_min must be >= 0, got {self.radius_min}")
        if self.radius_max <= self.radius_min:
            raise ValueError("radius_max must exceed radius_min")
        if self.margin is None:
            object.__setattr__(self, "margin", float(self.radius_max))
        if self.margin < self.radius_max:
            raise ValueError("margin must be >= radius_max")

    @property
    def extended_area(self) -> float:
        return (1.0 + 2.0 * self.margin) ** 2


@dataclass(frozen=True)
class BigClouds:
    """Unbounded isotropic random sets: a single half-plane per step, or a
    stationary process of parallel strips with Poisson boundaries."""

    variant: str = HALF_PLANE
    line_intensity: float = 3.0

    def __post_init__(self):
        if self.variant not in (HALF_PLANE, STRIPS):
            raise ValueError(f"variant must be {HALF_PLANE!r} or {STRIPS!r}, got {self.variant!r}")
        if self.variant == STRIPS and not self.line_intensity > 0:
            raise ValueError(f"line_intensity must be > 0, got {self.line_intensity}")


@dataclass(frozen=True)
class RandomWalkers:
    """Independent Gaussian random walkers, reflected at the boundary of the
    unit square extended by `margin`, sensed within `sensing_radius`.

    The default step size is calibrated so that a 2000-step run mixes well
    enough for pairwise cumulants to rank distances reliably; much smaller
    steps leave the occupation measure too uneven for that record length.
    """

    n_walkers: int = 10
    sensing_radius: float = 0.13
    step_sigma: float = 0.1
    margin: float | None = None

    def __post_init__(self):
        if self.n_walkers < 1:
            raise ValueError(f"n_walkers must be >= 1, got {self.n_walkers}")
        if not self.sensing_radius > 0:
            raise ValueError(f"sensing_radius must be > 0, got {self.sensing_radius}")
        if self.step_sigma < 0:
            raise ValueError(f"step_sigma must be >= 0, got {self.step_sigma}")
        if self.margin is None:
            object.__setattr__(self, "margin", float(self.sensing_radius))
        if self.margin < 0:
            raise ValueError(f"margin must be >= 0, got {self.margin}")

    @property
    def bounds(self) -> tuple[float, float]:
        return (-self.margin, 1.0 + self.margin)


FieldModel = Union[BooleanClouds, BigClouds, RandomWalkers]


@dataclass(frozen=True)
class ObservationMatrix:
    """N binary records of length T, stored bit-packed.

    Row i, bit j (LSB-first within each byte) is node i's record at step
    j+1. Trailing pad bits in the last byte of each row are zero.
    """

    n_sensors: int
    n_steps: int
    packed: np.ndarray

    def __post_init__(self):
        expected = (self.n_sensors, (self.n_steps + 7) // 8)
        if self.packed.shape != expected or self.packed.dtype != np.uint8:
            raise ValueError(f"packed bits must be uint8 with shape {expected}")

    @classmethod
    def from_dense(cls, bits: np.ndarray) -> "ObservationMatrix":
        bits = np.ascontiguousarray(bits, dtype=np.uint8)
        if bits.ndim != 2:
            raise ValueError("dense bits must be 2-D (n_sensors, n_steps)")
        if bits.max(initial=0) > 1:
            raise ValueError("dense bits must be 0/1")
        packed = np.packbits(bits, axis=1, bitorder="little")
        return cls(bits.shape[0], bits.shape[1], packed)

    def dense(self) -> np.ndarray:
        """Unpack to a (n_sensors, n_steps) uint8 matrix of 0/1."""
        return np.unpackbits(self.packed, axis=1, count=self.n_steps, bitorder="little")

    def column(self, t_index: int) -> np.ndarray:
        byte, bit = divmod(t_index, 8)
        return (self.packed[:, byte] >> bit) & 1

    def row_counts(self) -> np.ndarray:
        """Number of ones per row, as exact integers."""
        return np.bitwise_count(self.packed).sum(axis=1).astype(np.int64)


def _step_stream(rng: RngStream, t_index: int) -> np.random.Generator:
    return rng.substream("t", int(t_index)).generator


def sample_boolean_clouds(
    deployment: Deployment, model: BooleanClouds, t_index: int, rng
) -> np.ndarray:
    """One observation column under the disk coverage field.

    Draw order per step: cloud count, centers, radii. The column depends
    only on (seed, t_index), not on any other step's evaluation.
    """
    gen = _step_stream(check_rng(rng), t_index)
    lo, hi = -model.margin, 1.0 + model.margin
    k = int(gen.poisson(model.intensity * model.extended_area))
    if k == 0:
        return np.zeros(deployment.n_nodes, dtype=np.uint8)
    centers = gen.uniform(lo, hi, size=(k, 2))
    radii = gen.uniform(model.radius_min, model.radius_max, size=k)
    diff = deployment.positions[:, None, :] - centers[None, :, :]
    covered = (diff[..., 0] ** 2 + diff[..., 1] ** 2) <= radii[None, :] ** 2
    return covered.any(axis=1).astype(np.uint8)


def sample_big_clouds(
    deployment: Deployment, model: BigClouds, t_index: int, rng
) -> np.ndarray:
    """One observation column under a big-cloud realization.

    half_plane: isotropic direction e, offset u uniform on
    [-sqrt(2)/2, +sqrt(2)/2] around the square center; node z is covered
    iff <z - center, e> <= u.

    strips: isotropic direction; node projections fall in an alternating
    in/out partition of the line whose boundaries form a Poisson process
    of rate `line_intensity`, with a fair-coin phase for the leftmost
    interval.
    """
    gen = _step_stream(check_rng(rng), t_index)
    theta = gen.uniform(0.0, 2.0 * math.pi)
    direction = np.array([math.cos(theta), math.sin(theta)])
    if model.variant == HALF_PLANE:
        offset = gen.uniform(-_HALF_PLANE_OFFSET, _HALF_PLANE_OFFSET)
        proj = (deployment.positions - _SQUARE_CENTER) @ direction
        return (proj <= offset).astype(np.uint8)
    proj = deployment.positions @ direction
    lo = float(proj.min())
    hi = float(proj.max())
    phase = int(gen.integers(0, 2))
    n_bounds = int(gen.poisson(model.line_intensity * (hi - lo)))
    bounds = np.sort(gen.uniform(lo, hi, size=n_bounds))
    crossings = np.searchsorted(bounds, proj, side="right")
    return ((crossings + phase) % 2).astype(np.uint8)


def init_walkers(model: RandomWalkers, rng) -> np.ndarray:
    """Initial walker positions, uniform on the extended region."""
    lo, hi = model.bounds
    gen = check_rng(rng).generator
    return gen.uniform(lo, hi, size=(model.n_walkers, 2))


def _reflect(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    # Fold into [lo, hi] as a triangle wave; handles multiple crossings.
    span = hi - lo
    folded = np.mod(values - lo, 2.0 * span)
    folded = np.where(folded > span, 2.0 * span - folded, folded)
    return lo + folded


def step_walkers(state: np.ndarray, model: RandomWalkers, rng) -> np.ndarray:
    """Advance all walkers one isotropic Gaussian step with reflection."""
    state = np.asarray(state, dtype=np.float64)
    lo, hi = model.bounds
    if np.any(state < lo) or np.any(state > hi):
        raise ValueError("walker state outside the extended region")
    gen = check_rng(rng).generator
    steps = gen.normal(0.0, model.step_sigma, size=state.shape)
    return _reflect(state + steps, lo, hi)


def observe_walkers(deployment: Deployment, state: np.ndarray, sensing_radius: float) -> np.ndarray:
    """One observation column: 1 iff some walker is within `sensing_radius`."""
    if not sensing_radius > 0:
        raise ValueError(f"sensing_radius must be > 0, got {sensing_radius}")
    state = np.asarray(state, dtype=np.float64)
    diff = deployment.positions[:, None, :] - state[None, :, :]
    d2 = diff[..., 0] ** 2 + diff[..., 1] ** 2
    return (d2.min(axis=1) <= sensing_radius**2).astype(np.uint8)


def simulate_walkers(
    deployment: Deployment, model: RandomWalkers, n_steps: int, rng
) -> tuple[ObservationMatrix, np.ndarray]:
    """Run one walker trajectory for `n_steps`, observing after each step.

    Returns the observation matrix and the (n_steps, n_walkers, 2)
    trajectory of walker positions.
    """
    n_steps = check_positive_int(n_steps, "n_steps")
    rng = check_rng(rng)
    state = init_walkers(model, rng.substream("walkers", "init"))
    bits = np.empty((deployment.n_nodes, n_steps), dtype=np.uint8)
    trajectory = np.empty((n_steps, model.n_walkers, 2), dtype=np.float64)
    for t in range(n_steps):
        state = step_walkers(state, model, rng.substream("walkers", t))
        trajectory[t] = state
        bits[:, t] = observe_walkers(deployment, state, model.sensing_radius)
    return ObservationMatrix.from_dense(bits), trajectory


def generate_observations(
    deployment: Deployment,
    model: FieldModel,
    n_steps: int,
    rng,
    n_threads: int = 1,
) -> ObservationMatrix:
    """Synthesize the full observation matrix for a deployment.

    Cloud models produce independent realizations per step and may be
    generated on a thread pool (columns are written to disjoint slots, so
    the result is identical for any `n_threads`). The walker model is a
    single sequential trajectory.
    """
    n_steps = check_positive_int(n_steps, "n_steps")
    rng = check_rng(rng)
    if isinstance(model, RandomWalkers):
        obs, _ = simulate_walkers(deployment, model, n_steps, rng)
        return obs

    if isinstance(model, BooleanClouds):
        sampler = sample_boolean_clouds
    elif isinstance(model, BigClouds):
        sampler = sample_big_clouds
    else:
        raise TypeError(f"unknown field model {type(model).__name__}")

    bits = np.empty((deployment.n_nodes, n_steps), dtype=np.uint8)

    def fill(t_range):
        for t in t_range:
            bits[:, t] = sampler(deployment, model, t, rng)

    n_threads = max(1, int(n_threads))
    if n_threads == 1 or n_steps < 2 * n_threads:
        fill(range(n_steps))
    else:
        chunks = np.array_split(np.arange(n_steps), n_threads)
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(fill, chunks))
    return ObservationMatrix.from_dense(bits)
