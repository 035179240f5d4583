"""Command line entry point:

    sgplot --figure <survival|qite|correlator|kink> --csv PATH [--csv PATH ...]
           --out PATH.png

Exit codes: 0 on success, 2 for unusable input (missing column — named in the
message — empty CSV, unknown figure id, unreadable file).
"""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURES, ColumnError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sgplot", description=__doc__)
    parser.add_argument("--figure", required=True, choices=sorted(FIGURES))
    parser.add_argument("--csv", action="append", required=True, metavar="PATH")
    parser.add_argument("--out", required=True, metavar="PATH.png")
    args = parser.parse_args(argv)
    try:
        render(args.figure, args.csv, args.out)
    except (ColumnError, ValueError, OSError) as exc:
        print(f"sgplot: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
