"""Input validation helpers shared across the package."""

from __future__ import annotations

import numbers

import numpy as np

from .rng import RngStream


def check_rng(rng) -> RngStream:
    """Coerce `rng` to an RngStream (integers are treated as seeds)."""
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, numbers.Integral):
        return RngStream.from_seed(int(rng))
    raise TypeError(f"expected RngStream or integer seed, got {type(rng).__name__}")


def check_positions(positions, name: str = "positions") -> np.ndarray:
    """Validate an (n, 2) array of finite planar coordinates."""
    arr = np.asarray(positions, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"{name} must have shape (n, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite coordinates")
    return arr


def check_bit_rows(rows, name: str = "rows") -> np.ndarray:
    """Validate a (n_rows, n_steps) matrix of 0/1 values, returned as uint8."""
    arr = np.asarray(rows)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got ndim={arr.ndim}")
    if arr.shape[1] < 1:
        raise ValueError(f"{name} must have at least one time step")
    out = arr.astype(np.uint8, copy=False)
    if not np.array_equal(out, arr) or out.max(initial=0) > 1:
        raise ValueError(f"{name} entries must all be 0 or 1")
    return out


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return value


def check_nonnegative_int(value, name: str) -> int:
    if not isinstance(value, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    return value


def check_finite_float(value, name: str) -> float:
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value
