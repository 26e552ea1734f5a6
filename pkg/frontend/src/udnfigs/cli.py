"""Command-line front end: render one figure or the whole bundle.

Exit codes: 0 success, 2 figure/data problems (bad figure id, missing
columns, too few rows), 3 I/O problems (missing files, unwritable output).
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .figspec import FIGURE_IDS, FIGURES
from .render import RenderError, render, render_all


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udnfigs",
        description="Render deterministic SVG figures from udncoop sweep CSVs.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p_render = sub.add_parser("render", help="render one figure from one CSV")
    p_render.add_argument("--csv", required=True, help="input CSV path")
    p_render.add_argument("--figure", required=True, choices=FIGURE_IDS,
                          help="which bundled figure style to draw")
    p_render.add_argument("--out", required=True, help="output SVG path")

    p_all = sub.add_parser(
        "render-all",
        help="render every bundled figure plus an index page")
    p_all.add_argument("--csv-dir", required=True,
                       help="directory holding fig3.csv .. fig8.csv "
                            "and their manifests")
    p_all.add_argument("--out-dir", required=True,
                       help="output directory (created if needed)")
    return parser


def _cmd_render(args) -> int:
    out = render(FIGURES[args.figure], args.out, csv_path=args.csv)
    print(f"wrote {out}", file=sys.stderr)
    return 0


def _cmd_render_all(args) -> int:
    report = render_all(args.csv_dir, args.out_dir)
    for line in report.errors:
        print(f"figure error: {line}", file=sys.stderr)
    print(f"wrote {len(report.rendered)} figures and {report.index}",
          file=sys.stderr)
    return 3 if report.errors else 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits itself on --help / bad args
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        if args.command == "render":
            return _cmd_render(args)
        return _cmd_render_all(args)
    except RenderError as exc:
        print(f"figure error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
