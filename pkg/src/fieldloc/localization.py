"""Position recovery from beacon distance estimates.

Each node's position is the least-squares fit to its estimated distances
from the beacons: a linear solve of the differenced squared-distance
equations provides the initial point, then damped Gauss-Newton iterations
polish it. The returned iterate never has a worse objective than the
initializer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_positions, check_positive_int
from .deploy import Deployment, Point2
from .graph import HopDistanceTable, scale_hops


class DegenerateGeometryError(ValueError):
    """Beacon layout cannot pin down a position (collinear or too few)."""


@dataclass(frozen=True)
class MultilaterationFit:
    position: Point2
    residual: float
    converged: bool
    n_iterations: int


def _objective(z: np.ndarray, beacons: np.ndarray, dists: np.ndarray) -> float:
    r = np.linalg.norm(z - beacons, axis=1) - dists
    return float(r @ r)


def _linear_init(beacons: np.ndarray, dists: np.ndarray) -> np.ndarray:
    # Subtracting the first squared-distance equation from the others
    # leaves a linear system in z.
    a = 2.0 * (beacons[1:] - beacons[0])
    rhs = (
        (beacons[1:] ** 2).sum(axis=1)
        - (beacons[0] ** 2).sum()
        + dists[0] ** 2
        - dists[1:] ** 2
    )
    z, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    return z


def multilaterate(
    beacon_positions,
    distance_estimates,
    max_iterations: int = 100,
    step_tolerance: float = 1e-10,
) -> MultilaterationFit:
    """Fit a position to >= 3 non-collinear beacons and distance estimates.

    Minimizes the sum of squared range errors by Gauss-Newton with step
    halving, starting from the linear solve of the differenced equations.
    A non-converged fit is returned flagged, holding the best iterate seen.
    """
    beacons = check_positions(beacon_positions, "beacon_positions")
    dists = np.asarray(distance_estimates, dtype=np.float64)
    if dists.ndim != 1 or dists.size != beacons.shape[0]:
        raise ValueError("distance_estimates must be 1-D, one per beacon")
    if beacons.shape[0] < 3:
        raise ValueError(f"need at least 3 beacons, got {beacons.shape[0]}")
    if np.any(dists < 0) or not np.all(np.isfinite(dists)):
        raise ValueError("distance estimates must be finite and >= 0")
    spread = beacons - beacons.mean(axis=0)
    svals = np.linalg.svd(spread, compute_uv=False)
    if svals[-1] <= 1e-12 * max(svals[0], 1.0):
        raise DegenerateGeometryError("beacons are collinear")

    z = _linear_init(beacons, dists)
    best_z = z.copy()
    best_obj = _objective(z, beacons, dists)
    converged = False
    iterations = 0
    eps = 1e-300
    for iterations in range(1, max_iterations + 1):
        delta = z - beacons
        norms = np.linalg.norm(delta, axis=1)
        jac = delta / np.maximum(norms, eps)[:, None]
        residual = norms - dists
        step, *_ = np.linalg.lstsq(jac, -residual, rcond=None)
        # Halve the step until the objective stops getting worse.
        alpha = 1.0
        obj_here = _objective(z, beacons, dists)
        moved = False
        for _ in range(25):
            candidate = z + alpha * step
            if _objective(candidate, beacons, dists) <= obj_here:
                z = candidate
                moved = True
                break
            alpha *= 0.5
        obj_now = _objective(z, beacons, dists)
        if obj_now < best_obj:
            best_obj = obj_now
            best_z = z.copy()
        if not moved or np.linalg.norm(alpha * step) < step_tolerance:
            converged = moved or np.linalg.norm(step) < step_tolerance
            break
    return MultilaterationFit(
        position=Point2(float(best_z[0]), float(best_z[1])),
        residual=math.sqrt(best_obj),
        converged=converged,
        n_iterations=iterations,
    )


@dataclass(frozen=True)
class NodeEstimate:
    """Localization outcome for one node."""

    node_id: int
    true_position: Point2
    estimated_position: Point2 | None
    beacon_distances: np.ndarray
    residual: float
    error: float
    interior: bool
    localized: bool
    is_beacon: bool


@dataclass(frozen=True)
class LocalizationResult:
    nodes: list[NodeEstimate]
    interior_band: float

    @property
    def n_unlocalized(self) -> int:
        return sum(1 for n in self.nodes if not n.localized)

    def errors(self, interior: bool | None = None, include_beacons: bool = False) -> np.ndarray:
        out = []
        for n in self.nodes:
            if not n.localized or (n.is_beacon and not include_beacons):
                continue
            if interior is not None and n.interior != interior:
                continue
            out.append(n.error)
        return np.asarray(out, dtype=np.float64)


def _is_interior(p: np.ndarray, band: float) -> bool:
    return bool(np.all(p > band) and np.all(p < 1.0 - band))


def localize_all(
    deployment: Deployment,
    hops: HopDistanceTable,
    n: int,
    k: int,
    interior_band: float = 0.2,
) -> LocalizationResult:
    """Estimate every node's position from its hop distances to beacons.

    Hop counts are scaled to distances by sqrt(k / (pi n)) and fed to the
    multilateration solver. Beacons keep their known positions. Nodes that
    reach fewer than 3 beacons are reported unlocalized, never guessed.
    """
    n = check_positive_int(n, "n")
    k = check_positive_int(k, "k")
    estimates = scale_hops(hops, n, k)  # (n_sources, n_nodes), NaN unreachable
    return localize_from_estimates(deployment, hops.sources, estimates, interior_band)


def localize_from_estimates(
    deployment: Deployment,
    sources: np.ndarray,
    estimates: np.ndarray,
    interior_band: float = 0.2,
) -> LocalizationResult:
    """Core solver: per-node beacon distance estimates to positions."""
    sources = np.asarray(sources, dtype=np.int64)
    beacon_set = set(deployment.beacon_ids.tolist())
    if not set(sources.tolist()) <= beacon_set:
        raise ValueError("hop table sources must be beacon nodes")
    if estimates.shape != (sources.size, deployment.n_nodes):
        raise ValueError("estimates must have shape (n_sources, n_nodes)")
    source_positions = deployment.positions[sources]
    is_beacon = deployment.is_beacon

    nodes: list[NodeEstimate] = []
    for node in range(deployment.n_nodes):
        true_p = deployment.point(node)
        interior = _is_interior(deployment.positions[node], interior_band)
        dists = estimates[:, node]
        if is_beacon[node]:
            nodes.append(
                NodeEstimate(
                    node_id=node,
                    true_position=true_p,
                    estimated_position=true_p,
                    beacon_distances=dists,
                    residual=0.0,
                    error=0.0,
                    interior=interior,
                    localized=True,
                    is_beacon=True,
                )
            )
            continue
        usable = np.isfinite(dists)
        if usable.sum() < 3:
            nodes.append(
                NodeEstimate(
                    node_id=node,
                    true_position=true_p,
                    estimated_position=None,
                    beacon_distances=dists,
                    residual=float("nan"),
                    error=float("nan"),
                    interior=interior,
                    localized=False,
                    is_beacon=False,
                )
            )
            continue
        fit = multilaterate(source_positions[usable], dists[usable])
        est = np.array(fit.position)
        nodes.append(
            NodeEstimate(
                node_id=node,
                true_position=true_p,
                estimated_position=fit.position,
                beacon_distances=dists,
                residual=fit.residual,
                error=float(np.linalg.norm(est - deployment.positions[node])),
                interior=interior,
                localized=True,
                is_beacon=False,
            )
        )
    return LocalizationResult(nodes=nodes, interior_band=interior_band)


@dataclass(frozen=True)
class ErrorReport:
    """Summary statistics of localization errors (beacons excluded)."""

    n_nodes: int
    n_localized: int
    n_unlocalized: int
    mean_error: float
    median_error: float
    p90_error: float
    interior_median: float
    boundary_median: float

    @property
    def localized_fraction(self) -> float:
        return self.n_localized / self.n_nodes if self.n_nodes else 0.0


def error_report(result: LocalizationResult, deployment: Deployment) -> ErrorReport:
    """Aggregate per-node errors, split interior vs boundary band."""
    non_beacon = [n for n in result.nodes if not n.is_beacon]
    errors = result.errors()
    interior_errors = result.errors(interior=True)
    boundary_errors = result.errors(interior=False)

    def _stat(fn, arr):
        return float(fn(arr)) if arr.size else float("nan")

    return ErrorReport(
        n_nodes=len(non_beacon),
        n_localized=sum(1 for n in non_beacon if n.localized),
        n_unlocalized=sum(1 for n in non_beacon if not n.localized),
        mean_error=_stat(np.mean, errors),
        median_error=_stat(np.median, errors),
        p90_error=_stat(lambda a: np.percentile(a, 90), errors),
        interior_median=_stat(np.median, interior_errors),
        boundary_median=_stat(np.median, boundary_errors),
    )
