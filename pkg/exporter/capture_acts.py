#!/usr/bin/env python3
"""Capture per-layer input activations from text samples into DAQT files.

Usage:
    python capture_acts.py --model toy.pt --samples texts.txt \
        --layers "net.0" --out-dir d/

Each non-empty line of the samples file is one calibration sample; every
sample contributes one activation column per selected layer.
"""

import argparse
import sys

from exporter_lib import ExporterError
from exporter_lib.extract import capture_activations


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--model", required=True, help="toy checkpoint path (.pt)")
    parser.add_argument("--samples", required=True, help="text file, one sample per line")
    parser.add_argument("--layers", default="*", help="glob over module names")
    parser.add_argument("--out-dir", required=True)
    args = parser.parse_args(argv)
    with open(args.samples) as fh:
        samples = [line.rstrip("\n") for line in fh if line.strip()]
    if not samples:
        print("error: samples file is empty", file=sys.stderr)
        return 2
    try:
        manifest = capture_activations(args.model, samples, args.layers, args.out_dir)
    except ExporterError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    for name, path in manifest.layers.items():
        print(f"{name} -> {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
