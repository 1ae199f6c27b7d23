#!/usr/bin/env python3
"""Render sweep CSV output from the clam CLI.

Not part of the library or its tests; just a convenience for eyeballing
sweep results. Requires matplotlib.

Examples:
    clam sweep-height --config scenario.json --out height.csv
    tools/plot_sweep.py height.csv --x true_dz --y est_dz dz_error

    clam glint-map --config scenario.json --out glint.csv
    tools/plot_sweep.py glint.csv --heatmap dz_error
"""

import argparse
import csv
import math
import sys


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows:
        sys.exit(f"{path}: no data rows")
    return rows


def column(rows, name):
    out = []
    for r in rows:
        v = r[name]
        out.append(float(v) if v != "" else math.nan)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("csv_path")
    ap.add_argument("--x", default="true_dz", help="x-axis column (line plots)")
    ap.add_argument("--y", nargs="+", default=["dz_error"], help="y columns (line plots)")
    ap.add_argument("--heatmap", metavar="COL",
                    help="render COL over the (true_dx, true_dy) grid instead")
    ap.add_argument("--variant", help="filter rows by the variant column")
    ap.add_argument("--out", help="save to file instead of showing a window")
    args = ap.parse_args()

    import matplotlib
    if args.out:
        matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = load(args.csv_path)
    if args.variant:
        rows = [r for r in rows if r["variant"] == args.variant]
        if not rows:
            sys.exit(f"no rows with variant {args.variant!r}")

    if args.heatmap:
        nx = max(int(r["i"]) for r in rows) + 1
        ny = max(int(r["j"]) for r in rows) + 1
        grid = [[math.nan] * nx for _ in range(ny)]
        for r in rows:
            v = r[args.heatmap]
            grid[int(r["j"])][int(r["i"])] = float(v) if v != "" else math.nan
        xs = sorted({float(r["true_dx"]) for r in rows})
        ys = sorted({float(r["true_dy"]) for r in rows})
        im = plt.imshow(grid, origin="lower", aspect="auto",
                        extent=[xs[0], xs[-1], ys[0], ys[-1]])
        plt.colorbar(im, label=args.heatmap)
        plt.xlabel("true_dx [m]")
        plt.ylabel("true_dy [m]")
    else:
        x = column(rows, args.x)
        for name in args.y:
            plt.plot(x, column(rows, name), marker=".", label=name)
        plt.xlabel(f"{args.x} [m]")
        plt.ylabel("[m]")
        plt.legend()
        plt.grid(True, alpha=0.3)

    plt.title(args.csv_path)
    if args.out:
        plt.savefig(args.out, dpi=120, bbox_inches="tight")
        print(f"wrote {args.out}")
    else:
        plt.show()


if __name__ == "__main__":
    main()
