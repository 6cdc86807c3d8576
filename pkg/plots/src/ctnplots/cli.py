"""CLI entry point: plot --kind regimes --in t.csv --out fig.png [--normalize]."""

from __future__ import annotations

import argparse
import sys

from .data import EmptyDataError, SchemaError
from .render import KINDS, PlotSpec, render


def build_parser():
    parser = argparse.ArgumentParser(
        prog="plot", description="Render figures from ctn CSV output")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input CSV path(s)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--n", type=int, nargs="+", default=[],
                        help="system size per input (regimes/slopes kinds)")
    parser.add_argument("--normalize", action="store_true",
                        help="normalize the x axis by N")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(kind=args.kind, inputs=args.inputs, out=args.out,
                    n=args.n, normalize=args.normalize)
    try:
        render(spec)
    except (SchemaError, EmptyDataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
