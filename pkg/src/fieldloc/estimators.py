"""Scikit-learn style estimators over the cumulant-localization pipeline.

These wrap the functional modules so the algorithm composes with the
wider ecosystem (`get_params` / `set_params`, cloning, pipelines). Rows
of X are sensors, columns are time steps, entries are the 0/1 records.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from ._validation import check_bit_rows, check_positions
from .deploy import Deployment, compute_kn
from .estimation import cumulant_matrix
from .fields import ObservationMatrix
from .graph import build_proximity_graph, hop_distances, scale_hops
from .localization import localize_from_estimates


class CumulantAffinity(TransformerMixin, BaseEstimator):
    """Transform binary records into the pairwise-cumulant affinity matrix.

    With `lag_window=0` the output is the plain empirical covariance of
    each sensor pair; with a positive window, covariances over time lags
    in [-lag_window, +lag_window] are summed, which is what temporally
    persistent fields need.
    """

    def __init__(self, lag_window: int = 0):
        self.lag_window = lag_window

    def fit(self, X, y=None):
        X = check_bit_rows(X, "X")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        X = check_bit_rows(X, "X")
        cm = cumulant_matrix(ObservationMatrix.from_dense(X), self.lag_window)
        return cm.values(use_lagged=self.lag_window > 0)


class CumulantLocalizer(BaseEstimator):
    """Recover sensor positions from binary records plus a few anchors.

    fit(X, y): X is the (n_sensors, n_steps) record matrix; y is an
    (n_sensors, 2) coordinate array where anchor rows hold known positions
    and all other rows are NaN. The estimator ranks each sensor's partners
    by pairwise cumulant, links the top `n_neighbors` (default
    floor((ln n)^knn_exponent)), converts hop counts to the anchors into
    distances via sqrt(k / (pi n)), and multilaterates.

    Attributes: `positions_` (anchors keep their given coordinates, nodes
    that reach fewer than 3 anchors are NaN), `localized_`, `affinity_`,
    `graph_edges_`, `hop_scale_`, `n_neighbors_`.
    """

    def __init__(
        self,
        n_neighbors: int | None = None,
        knn_exponent: float = 1.2,
        lag_window: int = 0,
        interior_band: float = 0.2,
    ):
        self.n_neighbors = n_neighbors
        self.knn_exponent = knn_exponent
        self.lag_window = lag_window
        self.interior_band = interior_band

    def fit(self, X, y):
        X = check_bit_rows(X, "X")
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (X.shape[0], 2):
            raise ValueError(f"y must have shape (n_sensors, 2), got {y.shape}")
        anchor_mask = np.all(np.isfinite(y), axis=1)
        if anchor_mask.sum() < 3:
            raise ValueError("need at least 3 anchor rows with finite coordinates")
        n = X.shape[0]
        cm = cumulant_matrix(ObservationMatrix.from_dense(X), self.lag_window)
        self.affinity_ = cm.values(use_lagged=self.lag_window > 0)
        k = self.n_neighbors if self.n_neighbors is not None else compute_kn(n, self.knn_exponent)
        graph = build_proximity_graph(self.affinity_, k)
        anchors = np.flatnonzero(anchor_mask)
        table = hop_distances(graph, anchors)
        estimates = scale_hops(table, n, k)

        # The solver wants a Deployment; clamp anchor coordinates into the
        # unit square convention and place unknown nodes at the origin
        # (their true positions are irrelevant to the estimates).
        filled = np.where(anchor_mask[:, None], y, 0.0)
        deployment = Deployment(np.clip(filled, 0.0, 1.0), anchors)
        result = localize_from_estimates(deployment, anchors, estimates, self.interior_band)

        positions = np.full((n, 2), np.nan)
        localized = np.zeros(n, dtype=bool)
        for node in result.nodes:
            if node.estimated_position is not None:
                positions[node.node_id] = node.estimated_position
                localized[node.node_id] = True
        positions[anchor_mask] = y[anchor_mask]
        self.n_features_in_ = X.shape[1]
        self.anchor_mask_ = anchor_mask
        self.n_neighbors_ = k
        self.graph_edges_ = graph.edges
        self.hop_scale_ = float(np.sqrt(k / (np.pi * n)))
        self.positions_ = positions
        self.localized_ = localized
        return self

    def fit_predict(self, X, y) -> np.ndarray:
        return self.fit(X, y).positions_

    def predict(self) -> np.ndarray:
        if not hasattr(self, "positions_"):
            raise NotFittedError("CumulantLocalizer is not fitted")
        return self.positions_

    def score(self, X, y_true) -> float:
        """Negative median position error over localized non-anchor nodes."""
        if not hasattr(self, "positions_"):
            raise NotFittedError("CumulantLocalizer is not fitted")
        y_true = check_positions(y_true, "y_true")
        mask = self.localized_ & ~self.anchor_mask_
        if not mask.any():
            return float("nan")
        err = np.linalg.norm(self.positions_[mask] - y_true[mask], axis=1)
        return -float(np.median(err))
