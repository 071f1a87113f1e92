"""Command-line interface.

Exit codes: 0 success, 2 bad input, 3 I/O failure, 4 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import pipeline, tensor_io
from .baselines import DEFAULT_CLIP_RATE
from .errors import DaqError
from .formats import build_format
from .ldra import LdraConfig
from .pipeline import METHODS, QuantJob


def _add_format_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["nf", "int"], default="nf")
    p.add_argument("--bits", type=int, default=4)
    p.add_argument("--group-size", type=int, default=256)


def _add_method_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--m", type=float, default=2.275,
                   help="clipping rate percent for the density center")
    p.add_argument("--clip-rate", type=float, default=DEFAULT_CLIP_RATE,
                   help="percentile clipping rate")
    p.add_argument("--grid", type=str, default=None,
                   help="comma-separated range scale factors for grid search")
    p.add_argument("--eta0", type=float, default=1e-3)
    p.add_argument("--decay", type=float, default=0.05)
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--patience", type=int, default=50)
    p.add_argument("--no-scale", action="store_true",
                   help="keep the scale fixed during refinement")
    p.add_argument("--no-zero", action="store_true",
                   help="keep the zero-point fixed during refinement")
    p.add_argument("--workers", type=int, default=1)


def _job_from_args(args, method: str, out=None, report=None, trace=None) -> QuantJob:
    grid = pipeline.DEFAULT_GRID if args.grid is None else tuple(
        float(g) for g in args.grid.split(",")
    )
    return QuantJob(
        weights_path=args.weights,
        calib_path=args.calib,
        format_kind=args.format,
        bits=args.bits,
        group_size=args.group_size,
        method=method,
        out_path=out,
        report_path=report,
        trace_path=trace,
        workers=args.workers,
        m=args.m,
        clip_rate=args.clip_rate,
        grid=grid,
        ldra=LdraConfig(
            eta0=args.eta0,
            decay=args.decay,
            eps=args.eps,
            max_iters=args.iters,
            patience=args.patience,
            optimize_scale=not args.no_scale,
            optimize_zero=not args.no_zero,
        ),
    )


def _cmd_quantize(args) -> int:
    trace = f"{args.out}.trace.jsonl" if args.trace and args.out else None
    job = _job_from_args(args, args.method, out=args.out,
                         report=args.report, trace=trace)
    _, report = pipeline.quantize_layer(job)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_compare(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    jobs = [_job_from_args(args, m) for m in methods]
    result = pipeline.compare(jobs)
    print(result.to_table())
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(result.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(result.to_csv())
    return 0


def _cmd_codebook(args) -> int:
    fmt = build_format(args.format, args.bits)
    print(json.dumps(fmt.codebook.tolist()))
    return 0


def _cmd_gen(args) -> int:
    data = pipeline.generate_tensor(
        args.rows, args.cols, args.outlier_frac, args.outlier_scale, args.seed
    )
    tensor_io.save_tensor(data, args.out)
    print(f"wrote {args.rows}x{args.cols} tensor to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    packed = tensor_io.load_packed(args.packed)
    weights = tensor_io.load_tensor(args.weights)
    calib = tensor_io.load_tensor(args.calib)
    expected = None
    if args.report:
        with open(args.report) as fh:
            expected = json.load(fh)["total_loss"]
    total = pipeline.verify_packed(packed, weights, calib, expected)
    print(f"recomputed total loss: {total!r}")
    if expected is not None:
        print("matches report")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="daq",
        description="Density-aware post-training weight-only quantization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quantize", help="quantize one weight tensor")
    q.add_argument("--weights", required=True)
    q.add_argument("--calib", required=True)
    _add_format_args(q)
    q.add_argument("--method", choices=METHODS, default="daq")
    q.add_argument("--out", default=None, help="packed artifact path (.daqq)")
    q.add_argument("--report", default=None, help="report JSON path")
    q.add_argument("--trace", action="store_true",
                   help="dump per-iteration JSONL next to --out")
    _add_method_args(q)
    q.set_defaults(func=_cmd_quantize)

    c = sub.add_parser("compare", help="run several methods on the same inputs")
    c.add_argument("--weights", required=True)
    c.add_argument("--calib", required=True)
    _add_format_args(c)
    c.add_argument("--methods", default="minmax,percentile,grid,dca,daq")
    c.add_argument("--report", default=None, help="comparison JSON path")
    c.add_argument("--csv", default=None, help="comparison CSV path")
    _add_method_args(c)
    c.set_defaults(func=_cmd_compare)

    b = sub.add_parser("codebook", help="print a codebook as JSON")
    b.add_argument("--bits", type=int, required=True)
    b.add_argument("--format", choices=["nf", "int"], required=True)
    b.set_defaults(func=_cmd_codebook)

    g = sub.add_parser("gen", help="generate a seeded synthetic tensor")
    g.add_argument("--rows", type=int, required=True)
    g.add_argument("--cols", type=int, required=True)
    g.add_argument("--outlier-frac", type=float, default=0.0)
    g.add_argument("--outlier-scale", type=float, default=10.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)

    v = sub.add_parser("verify", help="recompute loss from a packed artifact")
    v.add_argument("--packed", required=True)
    v.add_argument("--weights", required=True)
    v.add_argument("--calib", required=True)
    v.add_argument("--report", default=None,
                   help="report JSON whose total_loss must match")
    v.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DaqError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
