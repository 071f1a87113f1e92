"""Learnable dynamic-range adjustment.

Per-group refinement of (scale, zero-point) that minimizes the calibration
output discrepancy

    L(s, z) = || s * (RTN(W/s + z) - z) @ X  -  W @ X ||_F^2

The round-to-nearest step makes L piecewise constant with jumps, so the
gradient is estimated by a finite difference and only its sign is used:

    dL(x, eps) = L(x + eps) - L(x - eps)
    x  <-  x - eta_t * sign(dL)          eta_t = eta0 / (1 + d * t)

Both parameters are stepped simultaneously from signs measured at the same
base point. The division by 2*eps is omitted since only the sign matters.
The best iterate ever visited (including the initialization) is returned,
which makes "refinement never hurts" an exact guarantee rather than a
convergence hope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ShapeMismatch
from .formats import QuantFormat
from .quantizer import SCALE_FLOOR, QuantParams, dequantize_group, quantize_group

MAX_ITERS_CAP = 1000


@dataclass(frozen=True)
class LdraConfig:
    eta0: float = 1e-3
    decay: float = 0.05
    eps: float = 1e-4
    max_iters: int = 200
    patience: int = 50
    optimize_scale: bool = True
    optimize_zero: bool = True

    def __post_init__(self):
        if self.eta0 <= 0:
            raise ValueError(f"eta0 must be > 0, got {self.eta0}")
        if self.decay < 0:
            raise ValueError(f"decay must be >= 0, got {self.decay}")
        if self.eps <= 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")
        if not 1 <= self.max_iters <= MAX_ITERS_CAP:
            raise ValueError(
                f"max_iters must be in [1, {MAX_ITERS_CAP}], got {self.max_iters}"
            )
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")


@dataclass
class OptimizeTrace:
    """Per-iteration diagnostics: (t, eta_t, loss after the step)."""

    steps: list[tuple[int, float, float]] = field(default_factory=list)
    init_loss: float = 0.0
    best_loss: float = 0.0
    best_params: QuantParams | None = None
    iterations_run: int = 0
    stop_reason: str = "max_iters"


def _as_group_matrices(wg, xg) -> tuple[np.ndarray, np.ndarray]:
    w = np.asarray(wg, dtype=np.float64)
    if w.ndim == 1:
        w = w[np.newaxis, :]
    x = np.asarray(xg, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, np.newaxis]
    if w.ndim != 2 or x.ndim != 2:
        raise ShapeMismatch("weights must be 1-D/2-D and calibration 1-D/2-D")
    if w.shape[1] != x.shape[0]:
        raise ShapeMismatch(
            f"group has {w.shape[1]} weights but calibration has {x.shape[0]} rows"
        )
    return w, x


def group_loss(wg, xg, p: QuantParams, fmt: QuantFormat) -> float:
    """Squared Frobenius discrepancy of the group output under quantization."""
    w, x = _as_group_matrices(wg, xg)
    ref = w @ x
    return _loss_against_ref(w, x, ref, p, fmt)


def _loss_against_ref(
    w: np.ndarray, x: np.ndarray, ref: np.ndarray, p: QuantParams, fmt: QuantFormat
) -> float:
    codes = quantize_group(w, p, fmt)
    w_hat = dequantize_group(codes, p, fmt)
    diff = w_hat @ x - ref
    return float(np.sum(diff * diff))


def finite_diff_sign(
    f: Callable[[float], float], x: float, eps: float, min_x: float | None = None
) -> int:
    """Sign of the finite-difference loss change at x.

    Uses the centered difference f(x+eps) - f(x-eps); falls back to the
    one-sided forward difference f(x+eps) - f(x) when x - eps would leave the
    parameter's domain (e.g. a scale dropping to <= 0).
    """
    if min_x is not None and x - eps <= min_x:
        delta = f(x + eps) - f(x)
    else:
        delta = f(x + eps) - f(x - eps)
    if delta > 0:
        return 1
    if delta < 0:
        return -1
    return 0


def lr_at(cfg: LdraConfig, t: int) -> float:
    """Decayed learning rate eta0 / (1 + d * t)."""
    if t < 0:
        raise ValueError(f"iteration index must be >= 0, got {t}")
    return cfg.eta0 / (1.0 + cfg.decay * t)


def optimize(
    wg,
    xg,
    init: QuantParams,
    fmt: QuantFormat,
    cfg: LdraConfig = LdraConfig(),
) -> tuple[QuantParams, OptimizeTrace]:
    """Sign-gradient refinement of (s, z); returns the best iterate visited.

    Deterministic: there is no randomness anywhere, so identical inputs give
    bit-identical traces. The returned loss is <= the initialization loss.
    """
    w, x = _as_group_matrices(wg, xg)
    ref = w @ x  # constant across iterations

    def loss_at(s: float, z: float) -> float:
        return _loss_against_ref(w, x, ref, QuantParams(s, z), fmt)

    trace = OptimizeTrace()
    s, z = init.s, init.z
    current = loss_at(s, z)
    trace.init_loss = current
    best_loss, best_s, best_z = current, s, z

    def finish(reason: str) -> tuple[QuantParams, OptimizeTrace]:
        trace.best_loss = best_loss
        trace.best_params = QuantParams(best_s, best_z)
        trace.stop_reason = reason
        return trace.best_params, trace

    if current == 0.0:
        return finish("zero_loss")
    if not (cfg.optimize_scale or cfg.optimize_zero):
        return finish("nothing_to_optimize")

    stale = 0
    for t in range(cfg.max_iters):
        sign_s = 0
        sign_z = 0
        if cfg.optimize_scale:
            sign_s = finite_diff_sign(
                lambda v: loss_at(v, z), s, cfg.eps, min_x=0.0
            )
        if cfg.optimize_zero:
            sign_z = finite_diff_sign(lambda v: loss_at(s, v), z, cfg.eps)

        if sign_s == 0 and sign_z == 0:
            # no motion is possible from here: the landscape is flat across
            # +/- eps in both directions and the iterate can never change
            trace.iterations_run = t
            return finish("plateau")

        eta = lr_at(cfg, t)
        s = max(s - eta * sign_s, SCALE_FLOOR)
        z = z - eta * sign_z
        current = loss_at(s, z)
        trace.steps.append((t, eta, current))
        trace.iterations_run = t + 1

        if current < best_loss:
            best_loss, best_s, best_z = current, s, z
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                return finish("patience")
        if current == 0.0:
            return finish("zero_loss")

    return finish("max_iters")
