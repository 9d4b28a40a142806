#!/usr/bin/env python3
"""Render the plotdata/*.csv files of a shadowlab run as PNG images."""

import argparse
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

COLOURS = {"PASS": "tab:green", "FAIL": "tab:red", "UNKNOWN": "tab:gray"}


def sh_set(df, out):
    fig, ax = plt.subplots(figsize=(7, 4))
    if "x1" in df.columns:
        for status, part in df.groupby("status"):
            ax.scatter(part.x0, part.x1, s=10, c=COLOURS.get(status, "k"), label=status)
        ax.set_ylabel("x1")
    else:
        for status, part in df.groupby("status"):
            ax.scatter(part.x0, part.eps, s=10, c=COLOURS.get(status, "k"), label=status)
        ax.set_ylabel("eps")
    ax.set_xlabel("x0")
    ax.legend()
    ax.set_title("shadowable-point estimates")
    fig.savefig(out, dpi=120, bbox_inches="tight")


def correspondence(df, out):
    fig, ax = plt.subplots(figsize=(7, 4))
    for status, part in df.groupby("suspension"):
        ax.scatter(part.x0, part.s, s=12, c=COLOURS.get(status, "k"), label=f"suspension {status}")
    ax.set_xlabel("base point")
    ax.set_ylabel("height")
    ax.legend()
    fig.savefig(out, dpi=120, bbox_inches="tight")


def return_map(df, out):
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(df.x, df.return_map, label="closed form")
    ax.plot(df.x, df.computed_return_map, "--", label="flowed")
    ax.set_xlabel("x")
    ax.set_ylabel("f(x)")
    ax.legend()
    fig.savefig(out, dpi=120, bbox_inches="tight")


def boxes(df, out):
    fig, ax = plt.subplots(figsize=(7, 2 if "lo1" not in df.columns else 7))
    for row in df.itertuples():
        if "lo1" in df.columns:
            ax.add_patch(plt.Rectangle((row.lo0, row.lo1), row.hi0 - row.lo0, row.hi1 - row.lo1))
        else:
            ax.plot([row.lo0, row.hi0], [0, 0], lw=6, c="tab:blue")
    ax.autoscale()
    ax.set_title("chain recurrent boxes")
    fig.savefig(out, dpi=120, bbox_inches="tight")


RENDERERS = {
    "sh_set.csv": sh_set,
    "correspondence.csv": correspondence,
    "return_map.csv": return_map,
    "chain_recurrent_boxes.csv": boxes,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("run_dir", type=pathlib.Path, help="output directory of `shadowlab run`")
    args = ap.parse_args()
    plotdata = args.run_dir / "plotdata"
    for name, render in RENDERERS.items():
        path = plotdata / name
        if path.exists():
            df = pd.read_csv(path)
            if df.empty:
                continue
            out = path.with_suffix(".png")
            render(df, out)
            print(out)


if __name__ == "__main__":
    main()
