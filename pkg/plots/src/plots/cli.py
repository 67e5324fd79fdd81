"""``plots <csv>... --out <dir>`` — one PNG per sweep CSV."""

from __future__ import annotations

import argparse
import sys

from . import render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots", description="render attnsep sweep CSVs as success-ratio figures"
    )
    parser.add_argument("csvs", nargs="+", metavar="CSV", help="sweep CSV files")
    parser.add_argument("--out", required=True, metavar="DIR", help="output directory")
    args = parser.parse_args(argv)
    try:
        written = render(args.csvs, args.out)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
