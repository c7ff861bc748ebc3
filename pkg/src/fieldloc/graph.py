"""Proximity graphs, hop distances, and the hop-to-distance scaling.

Two graph kinds share one representation: the cumulant-ranked graph (each
node linked to the k partners with the largest pairwise cumulants) and the
geometric reference graph (all pairs closer than a radius). Hop counts to
beacon nodes, rescaled by sqrt(k / (pi n)), estimate Euclidean distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from ._validation import check_positive_int
from .deploy import Deployment
from .estimation import CumulantMatrix

CUMULANT_TOPK = "cumulant_topk"
GEOMETRIC = "geometric"

UNREACHABLE = -1


@dataclass(frozen=True)
class ProximityGraph:
    """Undirected simple graph over node indices 0..n_nodes-1.

    `edges` is an (m, 2) array with i < j, sorted lexicographically, no
    duplicates. `k` is the per-node selection count for cumulant graphs,
    `radius` the connection radius for geometric graphs.
    """

    n_nodes: int
    edges: np.ndarray
    kind: str
    k: int | None = None
    radius: float | None = None

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= self.n_nodes:
                raise ValueError("edge endpoints out of range")
            if np.any(edges[:, 0] >= edges[:, 1]):
                raise ValueError("edges must satisfy i < j (no self-loops)")
            keys = edges[:, 0] * self.n_nodes + edges[:, 1]
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate edges")
            edges = edges[np.argsort(keys)]
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    def adjacency(self) -> csr_matrix:
        m = self.n_edges
        if m == 0:
            return csr_matrix((self.n_nodes, self.n_nodes), dtype=np.int8)
        i = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        j = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        data = np.ones(2 * m, dtype=np.int8)
        return csr_matrix((data, (i, j)), shape=(self.n_nodes, self.n_nodes))

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_nodes, dtype=np.int64)
        if self.n_edges:
            np.add.at(deg, self.edges[:, 0], 1)
            np.add.at(deg, self.edges[:, 1], 1)
        return deg


@dataclass(frozen=True)
class HopDistanceTable:
    """Hop counts from each source node; UNREACHABLE marks no path."""

    sources: np.ndarray
    hops: np.ndarray

    def __post_init__(self):
        sources = np.asarray(self.sources, dtype=np.int64)
        hops = np.asarray(self.hops, dtype=np.int64)
        if hops.ndim != 2 or hops.shape[0] != sources.size:
            raise ValueError("hops must have shape (n_sources, n_nodes)")
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "hops", hops)


def _dedupe_edges(i_idx: np.ndarray, j_idx: np.ndarray, n: int) -> np.ndarray:
    a = np.minimum(i_idx, j_idx)
    b = np.maximum(i_idx, j_idx)
    keys = np.unique(a.astype(np.int64) * n + b.astype(np.int64))
    return np.column_stack([keys // n, keys % n])


def build_proximity_graph(
    cm: CumulantMatrix | np.ndarray, k: int, use_lagged: bool = False
) -> ProximityGraph:
    """Link each node to its k largest-cumulant partners (undirected union).

    `cm` is a CumulantMatrix or a plain symmetric (n, n) score matrix.
    Ties are broken toward the smaller node index, making the edge set a
    pure function of the cumulant values.
    """
    k = check_positive_int(k, "k")
    if isinstance(cm, CumulantMatrix):
        values = cm.values(use_lagged)
    else:
        values = np.asarray(cm, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("score matrix must be square")
    n = values.shape[0]
    if k > n - 1:
        raise ValueError(f"k must be <= n - 1 = {n - 1}, got {k}")
    scores = np.array(values, dtype=np.float64, copy=True)
    np.fill_diagonal(scores, -np.inf)
    # Stable argsort of the negated scores: equal values keep ascending
    # index order, which is exactly the tie-break rule.
    order = np.argsort(-scores, axis=1, kind="stable")
    top = order[:, :k]
    i_idx = np.repeat(np.arange(n, dtype=np.int64), k)
    edges = _dedupe_edges(i_idx, top.ravel(), n)
    return ProximityGraph(n_nodes=n, edges=edges, kind=CUMULANT_TOPK, k=k)


def build_geometric_graph(deployment: Deployment, radius: float) -> ProximityGraph:
    """Link every pair of nodes strictly closer than `radius`."""
    radius = float(radius)
    if not radius > 0:
        raise ValueError(f"radius must be > 0, got {radius}")
    from scipy.spatial import cKDTree

    pos = deployment.positions
    pairs = cKDTree(pos).query_pairs(radius, output_type="ndarray")
    if pairs.size:
        d = np.linalg.norm(pos[pairs[:, 0]] - pos[pairs[:, 1]], axis=1)
        pairs = pairs[d < radius]  # strict inequality
    edges = _dedupe_edges(pairs[:, 0], pairs[:, 1], deployment.n_nodes) if pairs.size else np.empty((0, 2), np.int64)
    return ProximityGraph(n_nodes=deployment.n_nodes, edges=edges, kind=GEOMETRIC, radius=radius)


def geometric_radius(n: int, c: float) -> float:
    """Reference connection radius sqrt((ln n)^c / (pi n))."""
    n = check_positive_int(n, "n")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    c = float(c)
    if not c > 1.0:
        raise ValueError(f"exponent c must be > 1, got {c}")
    return math.sqrt(math.log(n) ** c / (math.pi * n))


def hop_distances(g: ProximityGraph, sources) -> HopDistanceTable:
    """Unweighted shortest-path hop counts from each source node."""
    sources = np.atleast_1d(np.asarray(sources, dtype=np.int64))
    if sources.size == 0:
        raise ValueError("sources must be non-empty")
    if sources.min() < 0 or sources.max() >= g.n_nodes:
        raise ValueError("source index out of range")
    dist = dijkstra(g.adjacency(), directed=False, unweighted=True, indices=sources)
    dist = np.atleast_2d(dist)
    hops = np.where(np.isinf(dist), UNREACHABLE, dist).astype(np.int64)
    return HopDistanceTable(sources=sources, hops=hops)


def hop_scale(n: int, k: int) -> float:
    """Distance per hop: sqrt(k / (pi n))."""
    n = check_positive_int(n, "n")
    k = check_positive_int(k, "k")
    return math.sqrt(k / (math.pi * n))


def scale_hops(table: HopDistanceTable, n: int, k: int) -> np.ndarray:
    """Distance estimates hops * sqrt(k / (pi n)); NaN where unreachable."""
    factor = hop_scale(n, k)
    estimates = table.hops.astype(np.float64) * factor
    estimates[table.hops == UNREACHABLE] = np.nan
    return estimates


@dataclass(frozen=True)
class KnnQualityReport:
    """How closely a graph matches the true k-nearest-neighbor graph."""

    recall: float
    median_rank: float
    n_true_edges: int
    n_shared_edges: int


def _distance_order(positions: np.ndarray) -> np.ndarray:
    """Row i: node indices sorted by distance from i (self first), stable."""
    diff = positions[:, None, :] - positions[None, :, :]
    d2 = diff[..., 0] ** 2 + diff[..., 1] ** 2
    return np.argsort(d2, axis=1, kind="stable")


def true_knn_edges(positions: np.ndarray, k: int) -> np.ndarray:
    """Undirected edge set of the k-nearest-neighbor graph (ties: lower index)."""
    n = positions.shape[0]
    order = _distance_order(positions)
    neighbors = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        row = order[i]
        neighbors[i] = row[row != i][:k]
    i_idx = np.repeat(np.arange(n, dtype=np.int64), k)
    return _dedupe_edges(i_idx, neighbors.ravel(), n)


def knn_quality(g: ProximityGraph, deployment: Deployment, k: int) -> KnnQualityReport:
    """Recall against the true kNN edge set, plus the median true rank of
    each node's selected partners in its distance ordering (1 = nearest)."""
    k = check_positive_int(k, "k")
    n = g.n_nodes
    pos = deployment.positions
    if pos.shape[0] != n:
        raise ValueError("deployment size does not match graph")
    true_edges = true_knn_edges(pos, k)
    true_keys = set(map(tuple, true_edges.tolist()))
    got_keys = set(map(tuple, g.edges.tolist()))
    shared = len(true_keys & got_keys)
    recall = shared / len(true_keys) if true_keys else 0.0

    order = _distance_order(pos)
    ranks_of = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        row = order[i]
        row = np.concatenate([[i], row[row != i]])
        ranks_of[i, row] = np.arange(n)
    partner_ranks = []
    for i, j in g.edges:
        partner_ranks.append(ranks_of[i, j])
        partner_ranks.append(ranks_of[j, i])
    median_rank = float(np.median(partner_ranks)) if partner_ranks else float("nan")
    return KnnQualityReport(
        recall=recall,
        median_rank=median_rank,
        n_true_edges=len(true_keys),
        n_shared_edges=shared,
    )
