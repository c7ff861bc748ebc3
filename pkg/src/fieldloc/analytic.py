"""Closed-form covariances of the field models and a Monte Carlo oracle.

The disk-coverage covariance has an exact expression built from void
probabilities; the big-cloud models are locally linear in distance; the
walker model's covariance is only characterized qualitatively. The
`montecarlo_covariance` oracle estimates the two-point covariance for any
model by direct simulation and is the arbiter whenever a formula and an
estimator disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._validation import check_rng
from .deploy import Deployment
from .fields import (
    HALF_PLANE,
    BigClouds,
    BooleanClouds,
    FieldModel,
    RandomWalkers,
    init_walkers,
    observe_walkers,
    step_walkers,
)

_QUAD_REL_TOL = 1e-8


@dataclass(frozen=True)
class CovarianceCurve:
    """Covariance as a function of inter-point distance.

    `stderr` entries are zero for exact formulas and one standard error for
    Monte Carlo estimates.
    """

    distances: np.ndarray
    values: np.ndarray
    stderr: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        s = np.asarray(self.stderr, dtype=np.float64)
        if d.ndim != 1 or d.shape != v.shape or d.shape != s.shape:
            raise ValueError("distances, values and stderr must be 1-D and equally long")
        if d.size and (np.any(d < 0) or np.any(np.diff(d) <= 0)):
            raise ValueError("distances must be non-negative and strictly increasing")
        if np.any(s < 0):
            raise ValueError("stderr must be non-negative")
        object.__setattr__(self, "distances", d)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "stderr", s)


def lens_area(dist: float, radius: float) -> float:
    """Area of intersection of two equal disks with centers `dist` apart.

    2 r^2 arccos(d / 2r) - (d/2) sqrt(4 r^2 - d^2) for d <= 2r, else 0.
    (The arccos term carries r squared; with a bare r the expression would
    not even have units of area, and it fails the slice-integration oracle.)
    """
    dist = float(dist)
    radius = float(radius)
    if dist < 0:
        raise ValueError(f"dist must be >= 0, got {dist}")
    if not radius > 0:
        raise ValueError(f"radius must be > 0, got {radius}")
    if dist >= 2.0 * radius:
        return 0.0
    half = dist / 2.0
    value = 2.0 * radius * radius * math.acos(half / radius) - half * math.sqrt(
        4.0 * radius * radius - dist * dist
    )
    # the two terms cancel catastrophically just below tangency; an area is
    # never negative
    return max(0.0, value)


def _mean_squared_radius(model: BooleanClouds) -> float:
    a, b = model.radius_min, model.radius_max
    return (a * a + a * b + b * b) / 3.0


def _mean_lens_area(dist: float, model: BooleanClouds) -> float:
    """E_R[lens_area(dist, R)] under the uniform radius law."""
    a, b = model.radius_min, model.radius_max
    if dist >= 2.0 * b:
        return 0.0
    lo = max(a, dist / 2.0)
    value, _ = integrate.quad(
        lambda r: lens_area(dist, r),
        lo,
        b,
        epsabs=1e-14,
        epsrel=_QUAD_REL_TOL,
        limit=200,
    )
    return value / (b - a)


def coverage_probability(model: BooleanClouds) -> float:
    """Probability that a point is covered: 1 - exp(-intensity * pi * E[R^2])."""
    return 1.0 - math.exp(-model.intensity * math.pi * _mean_squared_radius(model))


def boolean_covariance(dist: float, model: BooleanClouds) -> float:
    """Exact coverage-indicator covariance of the disk field.

    q^2 (exp(intensity * E_R[lens_area(dist, R)]) - 1), with q the void
    probability exp(-intensity * pi * E[R^2]). Derived from the joint void
    probability of two points; at dist 0 it reduces to the Bernoulli
    variance and beyond twice the maximal radius it is exactly zero.
    """
    dist = float(dist)
    if dist < 0:
        raise ValueError(f"dist must be >= 0, got {dist}")
    if dist >= 2.0 * model.radius_max:
        return 0.0
    q = math.exp(-model.intensity * math.pi * _mean_squared_radius(model))
    return q * q * math.expm1(model.intensity * _mean_lens_area(dist, model))


def bigclouds_covariance_fit(
    samples: CovarianceCurve, linear_cutoff: float = 0.3
) -> tuple[float, float, float]:
    """Least-squares fit value = a - b * dist over the linear regime.

    Returns (a, b, max_abs_residual). The caller is responsible for keeping
    the sampled distances inside the regime where the big-cloud covariance
    is linear; distances beyond `linear_cutoff` are rejected.
    """
    d = samples.distances
    if np.unique(d).size < 3:
        raise ValueError("need at least 3 distinct distances to fit a line")
    if np.any(d > linear_cutoff):
        raise ValueError(f"fit distances must not exceed the linear-regime cutoff {linear_cutoff}")
    design = np.column_stack([np.ones_like(d), -d])
    coef, *_ = np.linalg.lstsq(design, samples.values, rcond=None)
    a, b = float(coef[0]), float(coef[1])
    residuals = samples.values - (a - b * d)
    return a, b, float(np.max(np.abs(residuals)))


def _cov_and_stderr(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    n = x.size
    mx = x.mean()
    my = y.mean()
    value = float((x * y).mean() - mx * my)
    infl = (x - mx) * (y - my) - value
    stderr = float(np.sqrt(np.maximum(infl.var(), 0.0) / n))
    return value, stderr


def _mc_boolean(model: BooleanClouds, dist: float, n_samples: int, gen) -> tuple[float, float]:
    # Only clouds whose centers lie within radius_max of a probe can cover
    # it, so realizations are restricted to that window; this is exact, not
    # an approximation.
    r = model.radius_max
    p1 = np.array([0.0, 0.0])
    p2 = np.array([dist, 0.0])
    wx0, wx1 = -r, dist + r
    wy0, wy1 = -r, r
    area = (wx1 - wx0) * (wy1 - wy0)
    x = np.empty(n_samples, dtype=np.float64)
    y = np.empty(n_samples, dtype=np.float64)
    batch = 200_000
    done = 0
    while done < n_samples:
        b = min(batch, n_samples - done)
        counts = gen.poisson(model.intensity * area, size=b)
        total = int(counts.sum())
        cx = gen.uniform(wx0, wx1, size=total)
        cy = gen.uniform(wy0, wy1, size=total)
        radii = gen.uniform(model.radius_min, model.radius_max, size=total)
        owner = np.repeat(np.arange(b), counts)
        r2 = radii * radii
        hit1 = (cx - p1[0]) ** 2 + (cy - p1[1]) ** 2 <= r2
        hit2 = (cx - p2[0]) ** 2 + (cy - p2[1]) ** 2 <= r2
        x[done : done + b] = np.bincount(owner[hit1], minlength=b) > 0
        y[done : done + b] = np.bincount(owner[hit2], minlength=b) > 0
        done += b
    return _cov_and_stderr(x, y)


def _mc_big_clouds(model: BigClouds, dist: float, n_samples: int, gen) -> tuple[float, float]:
    theta = gen.uniform(0.0, 2.0 * math.pi, size=n_samples)
    # Probes sit symmetrically about the square center; their projections
    # onto the cloud direction are +-(dist/2) cos(angle difference).
    phi = gen.uniform(0.0, 2.0 * math.pi)
    half_proj = (dist / 2.0) * np.cos(theta - phi)
    if model.variant == HALF_PLANE:
        offset = gen.uniform(-math.sqrt(2) / 2, math.sqrt(2) / 2, size=n_samples)
        x = (half_proj <= offset).astype(np.float64)
        y = (-half_proj <= offset).astype(np.float64)
    else:
        gaps = np.abs(2.0 * half_proj)
        between = gen.poisson(model.line_intensity * gaps)
        phase = gen.integers(0, 2, size=n_samples)
        x = (phase % 2).astype(np.float64)
        y = ((phase + between) % 2).astype(np.float64)
    return _cov_and_stderr(x, y)


def _mc_walkers(model: RandomWalkers, dist: float, n_samples: int, rng) -> tuple[float, float]:
    # Snapshots of one long trajectory, spaced several sensing-radius
    # crossing times apart so they are effectively independent.
    if model.step_sigma > 0:
        spacing = max(1, math.ceil((2.0 * model.sensing_radius / model.step_sigma) ** 2))
    else:
        spacing = 1
    p1 = _probe_deployment(dist)
    state = init_walkers(model, rng.substream("mc", "init"))
    x = np.empty(n_samples, dtype=np.float64)
    y = np.empty(n_samples, dtype=np.float64)
    t = 0
    for s in range(n_samples):
        for _ in range(spacing):
            state = step_walkers(state, model, rng.substream("mc", t))
            t += 1
        col = observe_walkers(p1, state, model.sensing_radius)
        x[s] = col[0]
        y[s] = col[1]
    return _cov_and_stderr(x, y)


def _probe_deployment(dist: float) -> Deployment:
    # Probes symmetric about the square center; the diagonal accommodates
    # any separation up to sqrt(2).
    if dist > math.sqrt(2.0):
        raise ValueError(f"probe distance must be <= sqrt(2), got {dist}")
    e = np.array([1.0, 1.0]) / math.sqrt(2.0) if dist > 1.0 else np.array([1.0, 0.0])
    center = np.array([0.5, 0.5])
    return Deployment(np.vstack([center - (dist / 2.0) * e, center + (dist / 2.0) * e]))


def montecarlo_covariance(
    model: FieldModel, dist: float, n_samples: int, rng
) -> tuple[float, float]:
    """Monte Carlo estimate of the two-point covariance at distance `dist`.

    Places two probes `dist` apart centered in the region (orientation
    drawn from `rng`; all three models are isotropic in law), samples
    independent field realizations, and returns the empirical covariance
    of the two binary indicators with its standard error. For walkers the
    samples are well-separated snapshots of one long trajectory.
    """
    dist = float(dist)
    if dist < 0:
        raise ValueError(f"dist must be >= 0, got {dist}")
    n_samples = int(n_samples)
    if n_samples < 1000:
        raise ValueError(f"n_samples must be >= 1000, got {n_samples}")
    rng = check_rng(rng)
    gen = rng.substream("mc", "draws").generator
    if isinstance(model, BooleanClouds):
        return _mc_boolean(model, dist, n_samples, gen)
    if isinstance(model, BigClouds):
        return _mc_big_clouds(model, dist, n_samples, gen)
    if isinstance(model, RandomWalkers):
        return _mc_walkers(model, dist, n_samples, rng)
    raise TypeError(f"unknown field model {type(model).__name__}")


def covariance_curve_analytic(model: BooleanClouds, distances) -> CovarianceCurve:
    """Exact covariance curve of the disk field at the given distances."""
    d = np.asarray(distances, dtype=np.float64)
    values = np.array([boolean_covariance(x, model) for x in d])
    return CovarianceCurve(d, values, np.zeros_like(values))


def covariance_curve_montecarlo(
    model: FieldModel, distances, n_samples: int, rng
) -> CovarianceCurve:
    """Monte Carlo covariance curve with per-distance standard errors."""
    rng = check_rng(rng)
    d = np.asarray(distances, dtype=np.float64)
    values = np.empty_like(d)
    errs = np.empty_like(d)
    for idx, x in enumerate(d):
        values[idx], errs[idx] = montecarlo_covariance(
            model, float(x), n_samples, rng.substream("curve", idx)
        )
    return CovarianceCurve(d, values, errs)
