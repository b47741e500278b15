"""Command line entry point: dnls-plot --artifacts DIR --kind KIND --out FILE."""

from __future__ import annotations

import argparse
import sys

from .artifacts import ArtifactError
from .figures import KINDS, FigureSpec, StyleOptions, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dnls-plot",
        description="Render a figure from a finished run's artifact directory.")
    parser.add_argument("--artifacts", required=True,
                        help="run output directory (must contain manifest.json)")
    parser.add_argument("--kind", required=True, choices=KINDS,
                        help="which figure to draw")
    parser.add_argument("--out", required=True,
                        help="output image path (.png, .pdf, or .svg)")
    parser.add_argument("--dpi", type=int, default=150)
    parser.add_argument("--title", default=None,
                        help="override the default figure title")
    args = parser.parse_args(argv)

    style = StyleOptions(dpi=args.dpi, title=args.title)
    spec = FigureSpec(artifacts=args.artifacts, kind=args.kind,
                      out=args.out, style=style)
    try:
        out = render(spec)
    except (ArtifactError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


def run() -> None:
    sys.exit(main())
