"""End-to-end layer quantization, metrics, and comparison reporting.

A layer job runs per weight group: choose a dynamic range (min-max,
percentile, grid search, or density-centered), derive (s, z), optionally
refine them with the sign-gradient optimizer, then emit codes. Groups are
independent work items; they may be fanned out over a thread pool and are
always reduced in group-index order, so results are identical for any worker
count.

The final per-group (s, z) are snapped to their float32 values before codes
and losses are computed, which makes the written artifact reproduce the
report exactly when re-derived from disk.
"""

from __future__ import annotations

import json
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import tensor_io
from .baselines import (
    DEFAULT_CLIP_RATE,
    DEFAULT_GRID,
    grid_search_range,
    minmax_range,
    percentile_range,
)
from .dca import DcaConfig, dca_range
from .errors import (
    DaqError,
    EmptyInput,
    InputMismatch,
    ShapeMismatch,
    VerificationError,
    ZeroBaseline,
)
from .formats import QuantFormat, build_format
from .ldra import LdraConfig, OptimizeTrace, group_loss, optimize
from .quantizer import (
    GroupLayout,
    QuantParams,
    QuantizedGroup,
    compute_params,
    quantize_group,
)
from .validation import as_matrix, check_calibration

METHODS = ("minmax", "percentile", "grid", "dca", "ldra", "daq")
_LDRA_METHODS = {"ldra", "daq"}


@dataclass
class QuantJob:
    """File-level description of one quantization run."""

    weights_path: str
    calib_path: str
    format_kind: str = "nf"
    bits: int = 4
    group_size: int = 256
    method: str = "daq"
    out_path: Optional[str] = None
    report_path: Optional[str] = None
    trace_path: Optional[str] = None
    workers: int = 1
    m: float = 2.275
    clip_rate: float = DEFAULT_CLIP_RATE
    grid: tuple = DEFAULT_GRID
    ldra: LdraConfig = field(default_factory=LdraConfig)


@dataclass
class LayerReport:
    """Per-layer quantization quality summary."""

    method: str
    format_kind: str
    bits: int
    group_size: int
    rows: int
    cols: int
    n_groups: int
    total_loss: float
    group_loss_min: float
    group_loss_median: float
    group_loss_max: float
    iterations_total: int
    iterations_max: int
    wall_time_s: float
    improvements: dict = field(default_factory=dict)

    def canonical_dict(self) -> dict:
        """Deterministic content: everything except wall-clock time."""
        d = {
            "method": self.method,
            "format": self.format_kind,
            "bits": self.bits,
            "group_size": self.group_size,
            "rows": self.rows,
            "cols": self.cols,
            "n_groups": self.n_groups,
            "total_loss": self.total_loss,
            "group_loss_min": self.group_loss_min,
            "group_loss_median": self.group_loss_median,
            "group_loss_max": self.group_loss_max,
            "iterations_total": self.iterations_total,
            "iterations_max": self.iterations_max,
        }
        if self.improvements:
            d["improvements"] = self.improvements
        return d

    def canonical_json(self) -> str:
        return json.dumps(self.canonical_dict(), sort_keys=True)

    def to_dict(self) -> dict:
        d = self.canonical_dict()
        d["wall_time_s"] = self.wall_time_s
        return d


@dataclass
class _GroupResult:
    group: QuantizedGroup
    loss: float
    iterations: int
    trace: Optional[OptimizeTrace] = None


def _constant_group_result(w: np.ndarray, fmt: QuantFormat) -> _GroupResult:
    # all-equal group: s=1 and z=-v send every weight to the exact-zero code,
    # so the round trip is bit-exact and the loss is exactly 0
    v = float(w[0])
    params = QuantParams(1.0, float(np.float32(-v)))
    codes = quantize_group(w, params, fmt)
    return _GroupResult(QuantizedGroup(codes, params, 0.0), 0.0, 0)


def _select_range(w, xg, fmt, job: QuantJob):
    if job.method in ("minmax", "ldra"):
        return minmax_range(w)
    if job.method == "percentile":
        return percentile_range(w, job.clip_rate)
    if job.method == "grid":
        return grid_search_range(w, xg, fmt, job.grid)
    if job.method in ("dca", "daq"):
        return dca_range(w, DcaConfig(job.m))
    raise ValueError(f"unknown method {job.method!r}; choose from {METHODS}")


def _quantize_one_group(
    w: np.ndarray, xg: np.ndarray, fmt: QuantFormat, job: QuantJob, want_trace: bool
) -> _GroupResult:
    if float(w.min()) == float(w.max()):
        return _constant_group_result(w, fmt)

    params = compute_params(_select_range(w, xg, fmt, job), fmt)
    iterations = 0
    trace = None
    if job.method in _LDRA_METHODS:
        params, trace = optimize(w, xg, params, fmt, job.ldra)
        iterations = trace.iterations_run
        if not want_trace:
            trace = None

    # snap to the artifact's storage precision before the final pass
    params = QuantParams(float(np.float32(params.s)), float(np.float32(params.z)))
    codes = quantize_group(w, params, fmt)
    loss = group_loss(w, xg, params, fmt)
    return _GroupResult(QuantizedGroup(codes, params, loss), loss, iterations, trace)


def quantize_matrix(
    weights,
    calib,
    job: QuantJob,
    fmt: Optional[QuantFormat] = None,
    want_traces: bool = False,
) -> tuple[list[QuantizedGroup], GroupLayout, LayerReport, list]:
    """Array-level engine shared by the CLI pipeline and the estimator."""
    t0 = time.perf_counter()
    w = as_matrix(weights, "weights")
    x = as_matrix(calib, "calibration")
    check_calibration(w, x)
    fmt = fmt or build_format(job.format_kind, job.bits)
    layout = GroupLayout(job.group_size, w.shape[0], w.shape[1])

    def run(i: int) -> _GroupResult:
        row, cols = layout.group_slice(i)
        try:
            return _quantize_one_group(
                w[row, cols], x[cols, :], fmt, job, want_traces
            )
        except DaqError as e:
            raise type(e)(f"group {i}: {e}") from e

    indices = range(layout.n_groups)
    if job.workers > 1:
        with ThreadPoolExecutor(max_workers=job.workers) as pool:
            results = list(pool.map(run, indices))
    else:
        results = [run(i) for i in indices]

    losses = [r.loss for r in results]
    report = LayerReport(
        method=job.method,
        format_kind=fmt.kind,
        bits=fmt.bits,
        group_size=job.group_size,
        rows=layout.rows,
        cols=layout.cols,
        n_groups=layout.n_groups,
        total_loss=float(sum(losses)),
        group_loss_min=float(min(losses)),
        group_loss_median=float(statistics.median(losses)),
        group_loss_max=float(max(losses)),
        iterations_total=sum(r.iterations for r in results),
        iterations_max=max(r.iterations for r in results),
        wall_time_s=time.perf_counter() - t0,
    )
    traces = [r.trace for r in results] if want_traces else []
    return [r.group for r in results], layout, report, traces


def quantize_layer(job: QuantJob) -> tuple[tensor_io.PackedQuantizedTensor, LayerReport]:
    """File-to-file quantization: load, run the engine, write artifacts."""
    w = tensor_io.load_tensor(job.weights_path)
    x = tensor_io.load_tensor(job.calib_path)
    fmt = build_format(job.format_kind, job.bits)
    want_traces = job.trace_path is not None
    groups, layout, report, traces = quantize_matrix(
        w, x, job, fmt, want_traces=want_traces
    )
    packed = tensor_io.pack_quantized(groups, layout, fmt)
    if job.out_path:
        tensor_io.save_packed(packed, job.out_path)
    if job.report_path:
        with open(job.report_path, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    if job.trace_path:
        _dump_traces(traces, job.trace_path)
    return packed, report


def _dump_traces(traces: list, path: str) -> None:
    with open(path, "w") as fh:
        for gi, trace in enumerate(traces):
            if trace is None:
                continue
            for t, eta, loss in trace.steps:
                fh.write(json.dumps({"group": gi, "t": t, "eta": eta, "loss": loss}))
                fh.write("\n")


# --- metrics -----------------------------------------------------------------

def improvement(loss_baseline: float, loss_daq: float) -> float:
    """Percentage reduction of loss relative to a baseline."""
    if loss_baseline <= 0.0:
        raise ZeroBaseline(f"baseline loss must be > 0, got {loss_baseline}")
    return (loss_baseline - loss_daq) / loss_baseline * 100.0


def perplexity(token_logprobs) -> float:
    """exp of the mean negative log-likelihood (natural log) per token."""
    lps = list(token_logprobs)
    if not lps:
        raise EmptyInput("perplexity needs at least one log-probability")
    return math.exp(-sum(lps) / len(lps))


# --- comparison ---------------------------------------------------------------

@dataclass
class ComparisonReport:
    reports: dict  # method -> LayerReport
    improvements: dict  # method -> {baseline -> percent}
    best_method: str

    def to_dict(self) -> dict:
        return {
            "methods": {m: r.to_dict() for m, r in self.reports.items()},
            "improvements": self.improvements,
            "best_method": self.best_method,
        }

    def to_table(self) -> str:
        rows = [("method", "total_loss", "vs_first")]
        first = next(iter(self.reports))
        base = self.reports[first].total_loss
        for m, r in self.reports.items():
            if m == first or base <= 0:
                vs = "-"
            else:
                vs = f"{improvement(base, r.total_loss):+.2f}%"
            flag = " *" if m == self.best_method else ""
            rows.append((m + flag, f"{r.total_loss:.6g}", vs))
        widths = [max(len(r[i]) for r in rows) for i in range(3)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["method,total_loss"]
        for m, r in self.reports.items():
            lines.append(f"{m},{r.total_loss!r}")
        return "\n".join(lines) + "\n"


def compare(jobs: list[QuantJob]) -> ComparisonReport:
    """Run several methods over identical inputs and tabulate the losses."""
    if not jobs:
        raise EmptyInput("compare needs at least one job")
    first = jobs[0]
    for j in jobs[1:]:
        if (
            j.weights_path != first.weights_path
            or j.calib_path != first.calib_path
            or j.format_kind != first.format_kind
            or j.bits != first.bits
            or j.group_size != first.group_size
        ):
            raise InputMismatch("compare jobs must share inputs, format, and grouping")

    reports: dict[str, LayerReport] = {}
    for job in jobs:
        label = job.method
        n = 2
        while label in reports:  # repeated methods get distinct labels
            label = f"{job.method}#{n}"
            n += 1
        _, report = quantize_layer(job)
        reports[label] = report

    improvements: dict[str, dict[str, float]] = {}
    if len(reports) > 1:
        for m, r in reports.items():
            improvements[m] = {}
            for base_m, base_r in reports.items():
                if base_m == m or base_r.total_loss <= 0.0:
                    continue
                improvements[m][base_m] = improvement(
                    base_r.total_loss, r.total_loss
                )
    best = min(reports, key=lambda m: reports[m].total_loss)
    return ComparisonReport(reports, improvements, best)


# --- synthetic data + artifact verification -----------------------------------

def generate_tensor(
    rows: int,
    cols: int,
    outlier_frac: float = 0.0,
    outlier_scale: float = 10.0,
    seed: int = 0,
) -> np.ndarray:
    """Seeded standard-normal matrix with a fraction of entries scaled up.

    Values are rounded through float32 so the result is exactly what a DAQT
    round trip yields.
    """
    if rows <= 0 or cols <= 0:
        raise ShapeMismatch(f"dimensions must be positive, got {rows}x{cols}")
    if not 0.0 <= outlier_frac <= 1.0:
        raise ValueError(f"outlier fraction must be in [0, 1], got {outlier_frac}")
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((rows, cols))
    n_out = int(round(outlier_frac * rows * cols))
    if n_out > 0:
        idx = rng.choice(rows * cols, size=n_out, replace=False)
        data.ravel()[idx] *= outlier_scale
    return data.astype(np.float32).astype(np.float64)


def verify_packed(
    packed: tensor_io.PackedQuantizedTensor,
    weights,
    calib,
    expected_total_loss: Optional[float] = None,
) -> float:
    """Recompute the layer loss from an artifact and cross-check it.

    Re-derives each group's codes from the stored (s, z) and asserts they
    match the stored codes, then recomputes the loss. When a report total is
    given it must match the recomputation exactly.
    """
    w = as_matrix(weights, "weights")
    x = as_matrix(calib, "calibration")
    layout = packed.layout
    if (layout.rows, layout.cols) != w.shape:
        raise ShapeMismatch(
            f"artifact is {layout.rows}x{layout.cols}, weights are "
            f"{w.shape[0]}x{w.shape[1]}"
        )
    check_calibration(w, x)
    fmt = build_format(packed.kind, packed.bits)
    groups = tensor_io.unpack_quantized(packed, fmt)
    losses = []
    for i, g in enumerate(groups):
        row, cols = layout.group_slice(i)
        wg = w[row, cols]
        recomputed = quantize_group(wg, g.params, fmt)
        if not np.array_equal(recomputed, g.codes):
            raise VerificationError(
                f"group {i}: stored codes do not match re-quantization"
            )
        losses.append(group_loss(wg, x[cols, :], g.params, fmt))
    total = float(sum(losses))
    if expected_total_loss is not None and total != expected_total_loss:
        raise VerificationError(
            f"recomputed loss {total!r} != reported {expected_total_loss!r}"
        )
    return total
