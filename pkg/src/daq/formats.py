"""Quantization data types: uniform integer grids and NormalFloat codebooks.

A format is an ascending codebook of 2^k real values together with its
quantization range [x_min, x_max] (the span of the code values themselves).
The k-bit NormalFloat codebook places codes at standard-normal quantiles so
that spacing is finest near zero and coarsest at the +/-1 endpoints, which is
what makes range placement matter for bell-shaped weight groups.

Construction of NF-k:
  * clip offset  delta = (1/2^k + 1/(2^k - 1)) / 4
    (for k=4 this is (1/32 + 1/30)/2, i.e. the 0.9677083 offset convention)
  * negative half: 2^(k-1) normal quantiles at probabilities evenly spaced
    on [delta, 1/2]
  * positive half: 2^(k-1)+1 quantiles evenly spaced on [1/2, 1 - delta]
  * each half is divided by its extreme magnitude so the endpoints are
    exactly -1 and +1, then the shared zero is merged, leaving 2^k codes
    with an exact 0.

Normal quantiles are computed here by bisection on math.erf rather than via
a platform math library so codebooks are bit-reproducible everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedBitWidth

KIND_INT = "int"
KIND_NF = "nf"

# stable ids used by the packed file format
FORMAT_IDS = {KIND_INT: 1, KIND_NF: 2}
FORMAT_KINDS = {v: k for k, v in FORMAT_IDS.items()}


@dataclass(frozen=True)
class QuantFormat:
    """An immutable quantization data type (codebook + quantization range)."""

    kind: str
    bits: int
    codebook: np.ndarray = field(repr=False)

    def __post_init__(self):
        cb = np.asarray(self.codebook, dtype=np.float64)
        cb.setflags(write=False)
        object.__setattr__(self, "codebook", cb)
        if cb.size != 1 << self.bits:
            raise UnsupportedBitWidth(
                f"codebook has {cb.size} entries, expected {1 << self.bits}"
            )
        if np.any(np.diff(cb) <= 0):
            raise ValueError("codebook must be strictly ascending")

    @property
    def x_min(self) -> float:
        return float(self.codebook[0])

    @property
    def x_max(self) -> float:
        return float(self.codebook[-1])

    @property
    def n_codes(self) -> int:
        return 1 << self.bits

    @property
    def format_id(self) -> int:
        return FORMAT_IDS[self.kind]


def normal_quantile(p: float, tol: float = 1e-12) -> float:
    """Standard-normal inverse CDF by bisection on the error function.

    Deterministic across platforms; converges to within ``tol`` of the true
    quantile. Valid for 0 < p < 1.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must be in (0, 1), got {p}")
    if p == 0.5:
        return 0.0

    def cdf(x: float) -> float:
        return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))

    lo, hi = -1.0, 1.0
    while cdf(lo) > p:
        lo *= 2.0
    while cdf(hi) < p:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def build_int_format(bits: int) -> QuantFormat:
    """Uniform integer grid {0, ..., 2^k - 1}."""
    if not 2 <= bits <= 8:
        raise UnsupportedBitWidth(f"integer formats support 2..8 bits, got {bits}")
    return QuantFormat(KIND_INT, bits, np.arange(1 << bits, dtype=np.float64))


def build_nf_format(bits: int) -> QuantFormat:
    """NormalFloat codebook on [-1, 1] with an exact zero."""
    if not 2 <= bits <= 4:
        raise UnsupportedBitWidth(f"NormalFloat supports 2..4 bits, got {bits}")
    n = 1 << bits
    half = n // 2
    delta = (1.0 / n + 1.0 / (n - 1)) / 4.0

    neg_probs = np.linspace(delta, 0.5, half)
    pos_probs = np.linspace(0.5, 1.0 - delta, half + 1)
    neg = np.array([normal_quantile(p) for p in neg_probs])
    pos = np.array([normal_quantile(p) for p in pos_probs])
    neg /= abs(neg[0])
    pos /= pos[-1]

    codebook = np.concatenate([neg[:-1], [0.0], pos[1:]])
    return QuantFormat(KIND_NF, bits, codebook)


def build_format(kind: str, bits: int) -> QuantFormat:
    """Construct a format from its CLI/file identifiers."""
    if kind == KIND_INT:
        return build_int_format(bits)
    if kind == KIND_NF:
        return build_nf_format(bits)
    raise UnsupportedBitWidth(f"unknown format kind {kind!r}")
