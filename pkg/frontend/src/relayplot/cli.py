"""Command-line interface: ``relayplot plot`` renders comparison figures,
``relayplot gap`` reads off the dB distance between two curves at a target
error rate.

Exit codes: 0 success, 1 usage error, 2 runtime/I-O error.
"""

from __future__ import annotations

import argparse
import sys

from .curves import SchemaError, gap_db, load_csvs


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="relayplot", description=__doc__)
    sub = p.add_subparsers(dest="command")

    plot = sub.add_parser("plot", help="render a semilog comparison figure")
    plot.add_argument("--in", dest="inputs", nargs="+", required=True,
                      help="result CSV files, one curve each")
    plot.add_argument("--out", required=True, help="figure path (.png or .svg)")
    plot.add_argument("--title", default=None)

    gap = sub.add_parser("gap", help="dB distance between two curves at a CER")
    gap.add_argument("--in", dest="inputs", nargs=2, required=True,
                     metavar=("REF", "OTHER"))
    gap.add_argument("--at-cer", dest="at_cer", type=float, required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("expected a subcommand: plot or gap")
        if args.command == "gap" and args.at_cer <= 0:
            raise UsageError("--at-cer must be positive")
    except UsageError as exc:
        print(f"relayplot: error: {exc}", file=sys.stderr)
        return 1

    try:
        curves = load_csvs(args.inputs)
        if args.command == "plot":
            from .figure import render

            out = render(curves, args.out, args.title)
            print(f"relayplot: wrote {out}", file=sys.stderr)
            return 0
        gap = gap_db(curves.curves[0], curves.curves[1], args.at_cer)
        if gap is None:
            print(f"gap at CER {args.at_cer:g}: out of range")
        else:
            print(
                f"gap at CER {args.at_cer:g}: {gap:+.3f} dB "
                f"({curves.curves[1].label} relative to {curves.curves[0].label})"
            )
        return 0
    except SchemaError as exc:
        print(f"relayplot: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"relayplot: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
