"""Batch figure rendering from rotor-ratchet CSV files.

Exit statuses: 0 ok, 1 usage, 2 schema mismatch or render failure.
"""

from __future__ import annotations

import argparse
import sys

from .csvio import SchemaError
from .render import PLOT_KINDS, PlotJob, render

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SCHEMA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="ratchet-plots", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    p = sub.add_parser("render", help="render one figure from CSV inputs")
    p.add_argument("--kind", choices=PLOT_KINDS, required=True)
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="CSV")
    p.add_argument("--out", required=True, metavar="IMG")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command != "render":
            raise UsageError("missing command (try: render)")
        job = PlotJob(kind=args.kind, inputs=tuple(args.inputs), output=args.out)
        render(job)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemaError, ValueError, OSError) as err:
        print(f"render error: {err}", file=sys.stderr)
        return EXIT_SCHEMA
    print(args.out, file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
