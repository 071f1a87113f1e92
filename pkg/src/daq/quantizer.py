"""Quantize/dequantize kernels and group partitioning.

Weights are mapped onto a format's codebook through an affine projection
t = w/s + z, saturated to the quantization range, and rounded to the nearest
code; dequantization restores w~ = s * (codebook[code] - z). Scale and
zero-point are derived from a dynamic range [alpha, beta]:

    s = (beta - alpha) / (x_max - x_min)
    z = x_min - alpha / s

Tie rules are fixed so results are deterministic and platform-stable: the
integer grid rounds half to even on the projected value; codebook
nearest-neighbor ties go to the lower index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    CodeOutOfRange,
    DegenerateRange,
    IndivisibleGroupSize,
)
from .formats import KIND_INT, QuantFormat
from .validation import as_matrix

SCALE_FLOOR = 1e-8
RANGE_EPS = 1e-12


@dataclass(frozen=True)
class DynamicRange:
    """Real interval [alpha, beta] mapped onto the codebook."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise DegenerateRange("dynamic range must be finite")
        if not self.alpha < self.beta:
            raise DegenerateRange(
                f"dynamic range needs alpha < beta, got [{self.alpha}, {self.beta}]"
            )

    @property
    def width(self) -> float:
        return self.beta - self.alpha


@dataclass(frozen=True)
class QuantParams:
    """Per-group scale and zero-point."""

    s: float
    z: float

    def __post_init__(self):
        if not (np.isfinite(self.s) and self.s > 0.0):
            raise ValueError(f"scale must be finite and > 0, got {self.s}")
        if not np.isfinite(self.z):
            raise ValueError(f"zero-point must be finite, got {self.z}")


@dataclass(frozen=True)
class GroupLayout:
    """Contiguous column-wise grouping of a rows x cols weight matrix.

    group_size -1 means channel-wise: one group per row.
    """

    group_size: int
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise IndivisibleGroupSize(
                f"layout needs positive dims, got {self.rows}x{self.cols}"
            )
        if self.group_size == -1:
            return
        if self.group_size <= 0 or self.cols % self.group_size != 0:
            raise IndivisibleGroupSize(
                f"group size {self.group_size} does not divide {self.cols} columns"
            )

    @property
    def group_len(self) -> int:
        return self.cols if self.group_size == -1 else self.group_size

    @property
    def groups_per_row(self) -> int:
        return self.cols // self.group_len

    @property
    def n_groups(self) -> int:
        return self.rows * self.groups_per_row

    def group_slice(self, index: int) -> tuple[int, slice]:
        """(row, column slice) for the group at a row-major group index."""
        row, g = divmod(index, self.groups_per_row)
        start = g * self.group_len
        return row, slice(start, start + self.group_len)


@dataclass
class QuantizedGroup:
    """Codes plus parameters for one weight group."""

    codes: np.ndarray
    params: QuantParams
    group_loss: Optional[float] = None

    def __eq__(self, other):
        if not isinstance(other, QuantizedGroup):
            return NotImplemented
        return (
            np.array_equal(self.codes, other.codes)
            and self.params == other.params
        )


def compute_params(r: DynamicRange, fmt: QuantFormat) -> QuantParams:
    """Scale/zero-point that map [alpha, beta] onto [x_min, x_max]."""
    if r.width < RANGE_EPS:
        raise DegenerateRange(f"range width {r.width} below {RANGE_EPS}")
    s = r.width / (fmt.x_max - fmt.x_min)
    s = max(s, SCALE_FLOOR)
    z = fmt.x_min - r.alpha / s
    return QuantParams(s, z)


def quantize_group(w, p: QuantParams, fmt: QuantFormat) -> np.ndarray:
    """Nearest-code indices for each weight, saturating out-of-range values."""
    arr = np.asarray(w, dtype=np.float64)
    t = np.clip(arr / p.s + p.z, fmt.x_min, fmt.x_max)
    if fmt.kind == KIND_INT:
        return np.rint(t).astype(np.int64)
    cb = fmt.codebook
    hi = np.clip(np.searchsorted(cb, t), 1, cb.size - 1)
    lo = hi - 1
    pick_lo = (t - cb[lo]) <= (cb[hi] - t)  # ties go to the lower index
    return np.where(pick_lo, lo, hi).astype(np.int64)


def dequantize_group(codes, p: QuantParams, fmt: QuantFormat) -> np.ndarray:
    """Restore real values s * (codebook[code] - z)."""
    idx = np.asarray(codes)
    if idx.size and (idx.min() < 0 or idx.max() >= fmt.n_codes):
        raise CodeOutOfRange(
            f"codes must lie in [0, {fmt.n_codes}), got "
            f"[{idx.min()}, {idx.max()}]"
        )
    return p.s * (fmt.codebook[idx] - p.z)


def partition(t, group_size: int) -> tuple[GroupLayout, list[np.ndarray]]:
    """Split a matrix into contiguous per-row weight groups (views)."""
    arr = as_matrix(t, "weights")
    layout = GroupLayout(group_size, arr.shape[0], arr.shape[1])
    groups = []
    for i in range(layout.n_groups):
        row, cols = layout.group_slice(i)
        groups.append(arr[row, cols])
    return layout, groups
