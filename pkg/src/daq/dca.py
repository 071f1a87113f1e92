"""Density-centered range alignment.

The dynamic range is centered on the midpoint of two symmetric quantiles
(the high-density center) and widened to the farthest extreme, so dense
weights land in the fine-grained middle of a NormalFloat codebook while
outliers are still covered rather than clipped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateRange
from .quantizer import DynamicRange
from .validation import as_vector


@dataclass(frozen=True)
class DcaConfig:
    """m is the clipping rate in percent; 2.275 corresponds to the 2-sigma tail."""

    m: float = 2.275

    def __post_init__(self):
        if not 0.0 <= self.m < 50.0:
            raise ValueError(f"clipping rate must be in [0, 50), got {self.m}")


def quantile(w, p: float) -> float:
    """Order statistic with linear interpolation at position (n-1) * p / 100."""
    arr = as_vector(w, "weights")
    if not 0.0 <= p <= 100.0:
        raise ValueError(f"quantile percent must be in [0, 100], got {p}")
    data = sorted(arr.tolist())
    pos = (len(data) - 1) * p / 100.0
    lo = math.floor(pos)
    frac = pos - lo
    if frac == 0.0:
        return data[lo]
    return data[lo] + frac * (data[lo + 1] - data[lo])


def density_center(w, cfg: DcaConfig = DcaConfig()) -> float:
    """Midpoint of the m-th and (100-m)-th quantiles."""
    arr = as_vector(w, "weights", min_len=2)
    return (quantile(arr, cfg.m) + quantile(arr, 100.0 - cfg.m)) / 2.0


def dca_range(w, cfg: DcaConfig = DcaConfig()) -> DynamicRange:
    """Symmetric range about the density center covering all weights.

    k = max(w_max - center, center - w_min) and the range is
    [center - k, center + k]. The bounds are nudged onto the data extremes
    when rounding would otherwise leave min/max a final ulp outside, so the
    no-clipping containment guarantee holds exactly.
    """
    arr = as_vector(w, "weights", min_len=2)
    w_min = float(arr.min())
    w_max = float(arr.max())
    if w_min == w_max:
        raise DegenerateRange("all weights are equal")
    center = density_center(arr, cfg)
    k = max(w_max - center, center - w_min)
    alpha = min(center - k, w_min)
    beta = max(center + k, w_max)
    return DynamicRange(alpha, beta)
