"""qecplot CLI: overlay and panel figures from failure-curve CSVs.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .render import PlotSpec, SeriesSpec, render_overlay, render_scaling_panel


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _parse_series(token: str) -> SeriesSpec:
    """"path:label[:style]" with the label defaulting to the file stem."""
    parts = token.split(":")
    if len(parts) >= 2 and parts[-1] in ("line", "points-with-errors"):
        style = parts.pop()
    else:
        style = "auto"
    if len(parts) >= 2:
        path, label = ":".join(parts[:-1]), parts[-1]
    else:
        path = parts[0]
        label = os.path.splitext(os.path.basename(path))[0]
    if not os.path.exists(path):
        raise UsageError(f"input file not found: {path}")
    return SeriesSpec(path=path, label=label, style=style)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qecplot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    overlay = sub.add_parser("overlay", help="one figure with all series overlaid")
    overlay.add_argument("--in", dest="series", action="append", required=True,
                         metavar="PATH:LABEL", help="repeatable input series")
    overlay.add_argument("--out", required=True)
    overlay.add_argument("--logy", action="store_true")
    overlay.add_argument("--title")

    panel = sub.add_parser("panel", help="side-by-side panels with shared axes")
    panel.add_argument("--panel", dest="panels", action="append", required=True,
                       metavar="TITLE=PATH:LABEL[,PATH:LABEL...]",
                       help="repeatable panel description")
    panel.add_argument("--out", required=True)
    panel.add_argument("--logy", action="store_true")

    return parser


def cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "overlay":
            spec = PlotSpec(
                series=[_parse_series(tok) for tok in args.series],
                out=args.out,
                logy=args.logy,
                title=args.title,
            )
            render_overlay(spec)
        else:
            panels = []
            for desc in args.panels:
                title = None
                if "=" in desc.split(",")[0].split(":")[0]:
                    title, desc = desc.split("=", 1)
                series = [_parse_series(tok) for tok in desc.split(",")]
                panels.append(PlotSpec(series=series, out=args.out, title=title))
            render_scaling_panel(panels, args.out, logy=args.logy)
        return 0
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    except Exception as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
