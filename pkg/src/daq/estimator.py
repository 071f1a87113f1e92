"""Scikit-learn style wrapper around the group-wise quantization engine.

DaqQuantizer fits per-group quantization parameters for a weight matrix
against a calibration activation matrix, then transforms weight matrices of
the same shape through the learned quantize/dequantize round trip ("fake
quantization"), so quantization error can be studied with ordinary ecosystem
tooling:

    >>> q = DaqQuantizer(bits=4, group_size=256, method="daq")
    >>> w_hat = q.fit_transform(W, calibration=X)   # X rows == W columns
    >>> q.report_.total_loss
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import tensor_io
from .baselines import DEFAULT_CLIP_RATE, DEFAULT_GRID
from .errors import ShapeMismatch
from .formats import build_format
from .ldra import LdraConfig
from .pipeline import QuantJob, quantize_matrix
from .quantizer import QuantParams, dequantize_group, quantize_group
from .validation import as_matrix


class DaqQuantizer(TransformerMixin, BaseEstimator):
    """Group-wise weight quantizer with a learnable dynamic range.

    Parameters mirror the CLI: `method` picks the dynamic-range policy
    ("minmax", "percentile", "grid", "dca") or a policy plus sign-gradient
    refinement ("ldra" = min-max + refinement, "daq" = density-centered +
    refinement). The calibration matrix is passed to `fit` and must have one
    row per weight column.
    """

    def __init__(
        self,
        format="nf",
        bits=4,
        group_size=256,
        method="daq",
        m=2.275,
        clip_rate=DEFAULT_CLIP_RATE,
        grid=DEFAULT_GRID,
        eta0=1e-3,
        decay=0.05,
        eps=1e-4,
        max_iters=200,
        patience=50,
        optimize_scale=True,
        optimize_zero=True,
        workers=1,
    ):
        self.format = format
        self.bits = bits
        self.group_size = group_size
        self.method = method
        self.m = m
        self.clip_rate = clip_rate
        self.grid = grid
        self.eta0 = eta0
        self.decay = decay
        self.eps = eps
        self.max_iters = max_iters
        self.patience = patience
        self.optimize_scale = optimize_scale
        self.optimize_zero = optimize_zero
        self.workers = workers

    def _job(self) -> QuantJob:
        return QuantJob(
            weights_path="<memory>",
            calib_path="<memory>",
            format_kind=self.format,
            bits=self.bits,
            group_size=self.group_size,
            method=self.method,
            workers=self.workers,
            m=self.m,
            clip_rate=self.clip_rate,
            grid=tuple(self.grid),
            ldra=LdraConfig(
                eta0=self.eta0,
                decay=self.decay,
                eps=self.eps,
                max_iters=self.max_iters,
                patience=self.patience,
                optimize_scale=self.optimize_scale,
                optimize_zero=self.optimize_zero,
            ),
        )

    def fit(self, X, y=None, calibration=None):
        """Learn per-group (s, z) for weight matrix X.

        `calibration` is the activation matrix with X.shape[1] rows; it is
        required because every policy here is scored (and some are driven)
        by the calibration output error.
        """
        if calibration is None:
            raise ValueError("fit requires a calibration= activation matrix")
        w = as_matrix(X, "weights")
        groups, layout, report, _ = quantize_matrix(w, calibration, self._job())
        self.format_ = build_format(self.format, self.bits)
        self.layout_ = layout
        self.groups_ = groups
        self.params_ = np.array(
            [[g.params.s, g.params.z] for g in groups], dtype=np.float64
        )
        self.report_ = report
        self.total_loss_ = report.total_loss
        self.n_features_in_ = w.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "layout_"):
            raise NotFittedError("this DaqQuantizer instance is not fitted yet")

    def transform(self, X):
        """Quantize-dequantize a same-shaped matrix with the learned params."""
        self._check_fitted()
        w = as_matrix(X, "weights")
        if w.shape != (self.layout_.rows, self.layout_.cols):
            raise ShapeMismatch(
                f"expected shape {(self.layout_.rows, self.layout_.cols)}, "
                f"got {w.shape}"
            )
        out = np.empty_like(w)
        for i in range(self.layout_.n_groups):
            row, cols = self.layout_.group_slice(i)
            p = QuantParams(*self.params_[i])
            codes = quantize_group(w[row, cols], p, self.format_)
            out[row, cols] = dequantize_group(codes, p, self.format_)
        return out

    def to_packed(self) -> tensor_io.PackedQuantizedTensor:
        """The fitted state as a DAQQ artifact image."""
        self._check_fitted()
        return tensor_io.pack_quantized(self.groups_, self.layout_, self.format_)

    def save(self, path: str) -> None:
        tensor_io.save_packed(self.to_packed(), path)
