"""plots render: experiment artifacts in, figure files out."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .render import KINDS, PlotError, PlotSpec, render


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render cup-game experiment artifacts.")
    sub = parser.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("render", help="draw one figure")
    r.add_argument("--kind", required=True, choices=KINDS)
    r.add_argument("--in", dest="inputs", required=True, nargs="+",
                   metavar="PATH",
                   help="results.csv, or summary.json files for scatter-vs-n")
    r.add_argument("--out", required=True, help="output .png path")
    r.add_argument("--metric", default="tail_size",
                   help="results.csv metric a series plots (default tail_size)")
    r.add_argument("--xlabel", default=None)
    r.add_argument("--ylabel", default=None)

    args = parser.parse_args(argv)
    try:
        spec = PlotSpec(inputs=tuple(args.inputs), kind=args.kind,
                        out=args.out, metric=args.metric,
                        xlabel=args.xlabel, ylabel=args.ylabel)
        render(spec)
    except PlotError as e:
        print(f"plots: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
