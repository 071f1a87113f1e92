#!/usr/bin/env python3
"""Create a tiny randomly initialized toy checkpoint for exporter tests/demos."""

import argparse
import sys

from exporter_lib.toymodel import make_toy_checkpoint


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--dim", type=int, default=16)
    parser.add_argument("--hidden", type=int, default=32)
    parser.add_argument("--depth", type=int, default=2)
    parser.add_argument("--dtype", default="float16",
                        choices=["float16", "float32"])
    args = parser.parse_args(argv)
    config = make_toy_checkpoint(args.out, seed=args.seed, dim=args.dim,
                                 hidden=args.hidden, depth=args.depth,
                                 dtype=args.dtype)
    print(f"wrote {args.out}: {config}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
