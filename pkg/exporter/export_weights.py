#!/usr/bin/env python3
"""Export 2-D checkpoint layers to DAQT files plus a manifest.json.

Usage:
    python export_weights.py --model toy.pt --layers "net.*.weight" --out-dir d/
"""

import argparse
import sys

from exporter_lib import ExporterError
from exporter_lib.extract import export_weights


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--model", required=True, help="checkpoint path (.pt)")
    parser.add_argument("--layers", default="*", help="glob over layer names")
    parser.add_argument("--out-dir", required=True)
    args = parser.parse_args(argv)
    try:
        manifest = export_weights(args.model, args.layers, args.out_dir)
    except ExporterError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    for name, path in manifest.layers.items():
        print(f"{name} -> {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
