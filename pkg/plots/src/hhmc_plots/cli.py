"""Command-line entry: regenerate density and trace figures from a chain CSV.

Example:
    hhmc-plots --csv out/hhmc_samples.csv --summary out/comparison.json \
               --coords 0,1,15,29 --out figures/
writes figures/hhmc_samples_densities.png and figures/hhmc_samples_traces.png.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import DEFAULT_COORDS, FigureSpec, plot_densities, plot_traces


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hhmc-plots", description=__doc__)
    parser.add_argument("--csv", required=True, help="chain CSV file")
    parser.add_argument("--summary", required=True, help="comparison.json with truth_std")
    parser.add_argument(
        "--coords",
        default=",".join(str(c) for c in DEFAULT_COORDS),
        help="comma-separated coordinate indices",
    )
    parser.add_argument("--out", required=True, help="output directory for figures")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        coords = tuple(int(c) for c in args.coords.split(","))
    except ValueError:
        print(f"invalid --coords value: {args.coords!r}", file=sys.stderr)
        return 1

    stem = Path(args.csv).stem
    out_dir = Path(args.out)
    spec = FigureSpec(
        csv_path=Path(args.csv),
        summary_path=Path(args.summary),
        density_path=out_dir / f"{stem}_densities.png",
        trace_path=out_dir / f"{stem}_traces.png",
        coords=coords,
        label=stem.replace("_samples", ""),
    )
    try:
        density_file = plot_densities(spec)
        trace_file = plot_traces(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {density_file}")
    print(f"wrote {trace_file}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
