"""Empirical moments and pairwise cumulants of binary records.

Everything is computed from exact integer coincidence counts with one
final division, so results are independent of summation order and of any
threading in the underlying BLAS. (0/1 products summed in float64 stay
integer-valued well below 2^53, hence every intermediate is exact.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_bit_rows, check_nonnegative_int
from .fields import ObservationMatrix


@dataclass(frozen=True)
class PairStatistics:
    """Joint statistics of one sensor pair."""

    i: int
    j: int
    kappa: float
    mean_i: float
    mean_j: float
    c2: float
    c2_lagged: float | None = None


@dataclass(frozen=True)
class CumulantMatrix:
    """Symmetric pairwise moments for all sensor pairs.

    `kappa[i, j]` is the fraction of steps where both records are 1,
    `c2[i, j]` the empirical covariance; the diagonal of `c2` holds the
    per-sensor variances. `c2_lagged` is present when a lag window was
    requested.
    """

    n_sensors: int
    n_steps: int
    lag_window: int
    means: np.ndarray
    kappa: np.ndarray
    c2: np.ndarray
    c2_lagged: np.ndarray | None

    def pair(self, i: int, j: int) -> PairStatistics:
        lagged = None if self.c2_lagged is None else float(self.c2_lagged[i, j])
        return PairStatistics(
            i=i,
            j=j,
            kappa=float(self.kappa[i, j]),
            mean_i=float(self.means[i]),
            mean_j=float(self.means[j]),
            c2=float(self.c2[i, j]),
            c2_lagged=lagged,
        )

    @property
    def variances(self) -> np.ndarray:
        return np.diagonal(self.c2)

    def values(self, use_lagged: bool = False) -> np.ndarray:
        if use_lagged:
            if self.c2_lagged is None:
                raise ValueError("no lagged cumulants: matrix was built with lag_window=0")
            return self.c2_lagged
        return self.c2


def empirical_correlation(rows) -> float:
    """Fraction of steps at which every given record is simultaneously 1."""
    arr = np.asarray(rows)
    if arr.size == 0:
        raise ValueError("need at least one record")
    arr = check_bit_rows(arr)
    conj = np.bitwise_and.reduce(arr, axis=0)
    return int(conj.sum()) / arr.shape[1]


def pair_cumulant(row_i, row_j) -> PairStatistics:
    """Joint moment and covariance of two records of equal length."""
    rows = _pair_rows(row_i, row_j)
    t = rows.shape[1]
    n_i = int(rows[0].sum())
    n_j = int(rows[1].sum())
    n_ij = int((rows[0] & rows[1]).sum())
    return PairStatistics(
        i=0,
        j=1,
        kappa=n_ij / t,
        mean_i=n_i / t,
        mean_j=n_j / t,
        c2=(t * n_ij - n_i * n_j) / (t * t),
    )


def lagged_cumulant(row_i, row_j, lag_window: int) -> float:
    """Sum over lags s in [-lag_window, +lag_window] of the lag-s covariance.

    Each lag term is the coincidence count at offset s divided by the
    number of overlapping steps (T - |s|), minus the product of the
    full-record means.
    """
    rows = _pair_rows(row_i, row_j)
    lag_window = check_nonnegative_int(lag_window, "lag_window")
    t = rows.shape[1]
    if t <= 2 * lag_window:
        raise ValueError(f"need more than {2 * lag_window} steps for lag_window={lag_window}, got {t}")
    return float(_lagged_matrix(rows.astype(np.float64), lag_window)[0, 1])


def _pair_rows(row_i, row_j) -> np.ndarray:
    a = check_bit_rows(row_i, "row_i")
    b = check_bit_rows(row_j, "row_j")
    if a.shape != b.shape or a.shape[0] != 1:
        raise ValueError("row_i and row_j must be single records of equal length")
    return np.vstack([a, b])


def _coincidence_counts(dense_f: np.ndarray, shift: int) -> np.ndarray:
    """counts[i, j] = sum_t x_i(t) * x_j(t + shift), exact integers."""
    if shift == 0:
        prod = dense_f @ dense_f.T
    else:
        prod = dense_f[:, :-shift] @ dense_f[:, shift:].T
    return np.rint(prod).astype(np.int64)


def _lagged_matrix(dense_f: np.ndarray, lag_window: int) -> np.ndarray:
    t = dense_f.shape[1]
    counts = dense_f.sum(axis=1).astype(np.int64)
    mean_prod = np.outer(counts / t, counts / t)
    # s = 0 term in the exact-integer form, so lag_window=0 reproduces the
    # plain cumulant bit for bit.
    values = (t * _coincidence_counts(dense_f, 0) - np.outer(counts, counts)) / float(t * t)
    for s in range(1, lag_window + 1):
        c_s = _coincidence_counts(dense_f, s)
        values += (c_s + c_s.T) / (t - s) - 2.0 * mean_prod
    return values


def cumulant_matrix(obs: ObservationMatrix, lag_window: int = 0) -> CumulantMatrix:
    """Pairwise moments and cumulants for every unordered sensor pair."""
    lag_window = check_nonnegative_int(lag_window, "lag_window")
    t = obs.n_steps
    if lag_window > 0 and t <= 2 * lag_window:
        raise ValueError(f"need more than {2 * lag_window} steps for lag_window={lag_window}, got {t}")
    dense_f = obs.dense().astype(np.float64)
    counts = dense_f.sum(axis=1).astype(np.int64)
    joint = _coincidence_counts(dense_f, 0)
    kappa = joint / t
    c2 = (t * joint - np.outer(counts, counts)) / float(t * t)
    lagged = _lagged_matrix(dense_f, lag_window) if lag_window > 0 else None
    return CumulantMatrix(
        n_sensors=obs.n_sensors,
        n_steps=t,
        lag_window=lag_window,
        means=counts / t,
        kappa=kappa,
        c2=c2,
        c2_lagged=lagged,
    )
