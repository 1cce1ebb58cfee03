"""Render one figure kind from solver CSVs.

    mfg-figures trace out/cyber/solve/trace.csv --out fig/cyber_trace
    mfg-figures policy out/cyber/solve/policy.csv --out fig/cyber_policy
    mfg-figures infection out/cyber/solve/meanfield.csv --out fig/cyber_inf --states 0,2
    mfg-figures beach out/beach/solve/meanfield.csv --out fig/beach
    mfg-figures sweep out/sweep_cyber/sweep/sweep.csv --out fig/dmu_vs_n

Writes <out>.png and <out>.svg.
"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="mfg-figures", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("csv", nargs="+", help="input CSV path(s)")
    parser.add_argument("--out", required=True, help="output path without extension")
    parser.add_argument("--action", type=int, default=None,
                        help="action index for policy heatmaps (default: last)")
    parser.add_argument("--states", default=None,
                        help="comma-separated state indices to aggregate (infection)")
    parser.add_argument("--yscale", default=None, help="trace y scale (log/linear)")
    args = parser.parse_args(argv)

    options = {}
    if args.action is not None:
        options["action"] = args.action
    if args.states is not None:
        options["states"] = tuple(int(s) for s in args.states.split(","))
    if args.yscale is not None:
        options["yscale"] = args.yscale

    try:
        paths = render(FigureSpec(kind=args.kind, inputs=tuple(args.csv),
                                  out=args.out, options=options))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print("wrote " + ", ".join(paths))
    return 0


if __name__ == "__main__":
    sys.exit(main())
