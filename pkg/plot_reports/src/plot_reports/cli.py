"""Standalone entry point: plot_reports <figure_kind> <csv> <out_image>."""

import argparse
import sys

import matplotlib.pyplot as plt

from .render import FIGURE_KINDS, FigureSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot_reports",
        description="Render a qse-decode sweep CSV into a figure",
    )
    parser.add_argument("figure_kind", choices=FIGURE_KINDS)
    parser.add_argument("csv_path")
    parser.add_argument("output_image_path")
    parser.add_argument(
        "--linear-y", action="store_true", help="linear instead of log y axis"
    )
    args = parser.parse_args(argv)
    spec = FigureSpec(
        csv_path=args.csv_path,
        figure_kind=args.figure_kind,
        output_image_path=args.output_image_path,
        log_y=not args.linear_y,
    )
    try:
        fig = render(spec)
        plt.close(fig)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.output_image_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
