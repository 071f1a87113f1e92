"""Input validation helpers.

All numeric entry points normalize to float64 ndarrays: file payloads are
32-bit, but the optimizer and the acceptance tolerances need double
arithmetic, so values are widened exactly on the way in.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyInput, NonFiniteValue, ShapeMismatch


def as_matrix(a, name: str = "array") -> np.ndarray:
    """Validate a 2-D real matrix, returning a float64 copy/view."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.size == 0:
        raise EmptyInput(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{name} contains NaN or Inf")
    return arr


def as_vector(a, name: str = "values", min_len: int = 1) -> np.ndarray:
    """Validate a 1-D real vector, returning a float64 array."""
    arr = np.asarray(a, dtype=np.float64).ravel()
    if arr.size < min_len:
        raise EmptyInput(f"{name} needs at least {min_len} value(s), got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{name} contains NaN or Inf")
    return arr


def check_calibration(weights: np.ndarray, calib: np.ndarray) -> None:
    """Calibration rows must line up with weight columns (W @ X must exist)."""
    if weights.shape[1] != calib.shape[0]:
        raise ShapeMismatch(
            f"calibration has {calib.shape[0]} rows but weights have "
            f"{weights.shape[1]} columns"
        )
