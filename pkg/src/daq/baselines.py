"""Reference dynamic-range policies: min-max, percentile clipping, grid search.

These are the comparison points the density-centered policy is measured
against. All of them are deterministic, pure per group, and return a
DynamicRange suitable for compute_params.
"""

from __future__ import annotations

from .dca import quantile
from .errors import DegenerateRange
from .formats import QuantFormat
from .ldra import group_loss
from .quantizer import RANGE_EPS, DynamicRange, compute_params
from .validation import as_vector

# 0.80 .. 1.20 in steps of 0.01: covers both contraction and expansion
DEFAULT_GRID = tuple(round(0.80 + 0.01 * i, 2) for i in range(41))
DEFAULT_CLIP_RATE = 1.0


def minmax_range(w) -> DynamicRange:
    """[min(w), max(w)]."""
    arr = as_vector(w, "weights")
    lo, hi = float(arr.min()), float(arr.max())
    if hi - lo < RANGE_EPS:
        raise DegenerateRange("weights span a degenerate range")
    return DynamicRange(lo, hi)


def percentile_range(w, clip_rate: float = DEFAULT_CLIP_RATE) -> DynamicRange:
    """[quantile(clip_rate), quantile(100 - clip_rate)]."""
    if not 0.0 <= clip_rate < 50.0:
        raise ValueError(f"clip rate must be in [0, 50), got {clip_rate}")
    arr = as_vector(w, "weights")
    lo = quantile(arr, clip_rate)
    hi = quantile(arr, 100.0 - clip_rate)
    if hi - lo < RANGE_EPS:
        raise DegenerateRange(f"clip rate {clip_rate} collapses the range")
    return DynamicRange(lo, hi)


def grid_search_range(
    w, xg, fmt: QuantFormat, grid=DEFAULT_GRID
) -> DynamicRange:
    """Min-max range rescaled by the loss-minimizing factor from ``grid``.

    Candidate gamma keeps the min-max midpoint fixed and scales the width;
    ties are broken toward gamma closest to 1, then toward the smaller gamma.
    """
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("grid must be nonempty")
    arr = as_vector(w, "weights")
    lo, hi = float(arr.min()), float(arr.max())
    if hi - lo < RANGE_EPS:
        raise DegenerateRange("weights span a degenerate range")
    center = (lo + hi) / 2.0
    width = hi - lo

    best = None
    for gamma in grid:
        if gamma == 1.0:
            r = DynamicRange(lo, hi)  # exact min-max, no midpoint rounding
        else:
            half = gamma * width / 2.0
            if 2.0 * half < RANGE_EPS:
                continue
            r = DynamicRange(center - half, center + half)
        loss = group_loss(arr, xg, compute_params(r, fmt), fmt)
        key = (loss, abs(gamma - 1.0), gamma)
        if best is None or key < best[0]:
            best = (key, r)
    if best is None:
        raise DegenerateRange("every grid candidate collapses the range")
    return best[1]
