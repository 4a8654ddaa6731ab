"""Render the empirical four-regime phase diagram from a sweep CSV.

Reads the benchmark harness CSV (exact schema below), draws a success-rate
heatmap over the (alpha, beta) grid per algorithm, and overlays the three
theoretical boundary lines beta = alpha, beta = (1 + alpha) / 2, and
beta = alpha + 1/2 on request. Cells whose parameters were skipped by the
sweep (trials = 0) are hatched. Output is written as both PNG and SVG.

Rendering is read-only over the CSV and deterministic for a fixed CSV and
library version (no timestamps or hash salts end up in the output).
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

CSV_COLUMNS = ["model", "algorithm", "n", "r", "K", "p", "q", "mu",
               "alpha", "beta", "trials", "successes", "success_rate",
               "wilson_lo", "wilson_hi", "predicted_regime", "wall_ms"]


class SchemaError(ValueError):
    """CSV header does not match the sweep schema."""


@dataclass(frozen=True)
class PlotSpec:
    csv_path: str
    out_path: str
    algorithm: Optional[str] = None
    colormap: str = "viridis"
    overlay_boundaries: bool = True


def read_sweep_csv(path):
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise SchemaError("empty CSV: no header row")
        for i, (got, want) in enumerate(zip(header, CSV_COLUMNS)):
            if got != want:
                raise SchemaError(f"column {i} is {got!r}, expected {want!r}")
        if len(header) != len(CSV_COLUMNS):
            raise SchemaError(f"expected {len(CSV_COLUMNS)} columns, got {len(header)}")
        rows = []
        for rec in reader:
            if not rec:
                continue
            row = dict(zip(CSV_COLUMNS, rec))
            row["alpha"] = float(row["alpha"])
            row["beta"] = float(row["beta"])
            row["trials"] = int(row["trials"])
            row["success_rate"] = float(row["success_rate"]) if row["success_rate"] else np.nan
            rows.append(row)
    return rows


def boundary_lines(num=256):
    """The three theoretical boundaries as (alpha, beta) arrays, clipped to
    the unit square: information limit beta = alpha, conjectured
    computational limit beta = (1 + alpha) / 2, counting limit
    beta = alpha + 1/2."""
    alpha = np.linspace(0.0, 1.0, num)
    lines = []
    for f in (lambda a: a, lambda a: (1 + a) / 2, lambda a: a + 0.5):
        beta = f(alpha)
        keep = beta <= 1.0
        lines.append((alpha[keep], beta[keep]))
    return lines


def _grid(rows):
    alphas = sorted({r["alpha"] for r in rows})
    betas = sorted({r["beta"] for r in rows})
    rate = np.full((len(betas), len(alphas)), np.nan)
    skipped = np.zeros_like(rate, dtype=bool)
    ai = {a: i for i, a in enumerate(alphas)}
    bi = {b: i for i, b in enumerate(betas)}
    for r in rows:
        i, j = bi[r["beta"]], ai[r["alpha"]]
        if r["trials"] == 0:
            skipped[i, j] = True
        else:
            rate[i, j] = r["success_rate"]
    return np.array(alphas), np.array(betas), rate, skipped


def _cell_edges(centers):
    if len(centers) == 1:
        half = 0.05
        return np.array([centers[0] - half, centers[0] + half])
    mids = (centers[:-1] + centers[1:]) / 2
    first = centers[0] - (mids[0] - centers[0])
    last = centers[-1] + (centers[-1] - mids[-1])
    return np.concatenate([[first], mids, [last]])


def render_phase_diagram(spec: PlotSpec):
    """Write <out>.png and <out>.svg; returns the two paths."""
    rows = read_sweep_csv(spec.csv_path)
    if spec.algorithm is not None:
        rows = [r for r in rows if r["algorithm"] == spec.algorithm]
        if not rows:
            raise ValueError(f"no rows for algorithm {spec.algorithm!r}")
    algorithms = sorted({r["algorithm"] for r in rows})
    fig, axes = plt.subplots(1, len(algorithms), squeeze=False,
                             figsize=(5.2 * len(algorithms), 4.6))
    cmap = plt.get_cmap(spec.colormap).copy()
    cmap.set_bad("0.92")
    mesh = None
    for ax, alg in zip(axes[0], algorithms):
        sel = [r for r in rows if r["algorithm"] == alg]
        alphas, betas, rate, skipped = _grid(sel)
        xe, ye = _cell_edges(alphas), _cell_edges(betas)
        shaded = np.ma.masked_invalid(rate)
        mesh = ax.pcolormesh(xe, ye, shaded, cmap=cmap, vmin=0.0, vmax=1.0)
        for i in range(len(betas)):
            for j in range(len(alphas)):
                if skipped[i, j]:
                    ax.add_patch(plt.Rectangle((xe[j], ye[i]), xe[j + 1] - xe[j],
                                               ye[i + 1] - ye[i], fill=False,
                                               hatch="///", edgecolor="0.5",
                                               linewidth=0.0))
        if spec.overlay_boundaries:
            styles = ["--", "-", ":"]
            names = ["information limit", "computational limit (conj.)",
                     "counting limit"]
            for (la, lb), style, name in zip(boundary_lines(), styles, names):
                ax.plot(la, lb, style, color="white", linewidth=1.6)
                ax.plot(la, lb, style, color="crimson", linewidth=1.0, label=name)
            ax.legend(loc="lower right", fontsize=7, framealpha=0.85)
        ax.set_xlim(xe[0], xe[-1])
        ax.set_ylim(ye[0], ye[-1])
        ax.set_xlabel(r"$\alpha$")
        ax.set_ylabel(r"$\beta$")
        ax.set_title(f"{alg}: empirical success rate")
    fig.colorbar(mesh, ax=axes[0], label="success rate", shrink=0.9)

    base = Path(spec.out_path)
    if base.suffix.lower() in (".png", ".svg"):
        base = base.with_suffix("")
    png = base.with_suffix(".png")
    svg = base.with_suffix(".svg")
    plt.rcParams["svg.hashsalt"] = "planted-bench-plots"
    fig.savefig(png, dpi=150, metadata={"Software": None})
    fig.savefig(svg, metadata={"Date": None})
    plt.close(fig)
    return png, svg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="planted-plots",
                                     description="Render a sweep CSV as a phase diagram")
    parser.add_argument("--csv", required=True)
    parser.add_argument("--out", required=True, help="output base path (writes .png and .svg)")
    parser.add_argument("--alg", default=None, help="only this algorithm's rows")
    parser.add_argument("--overlay", action="store_true",
                        help="draw the three theoretical boundary lines")
    parser.add_argument("--cmap", default="viridis")
    args = parser.parse_args(argv)
    spec = PlotSpec(csv_path=args.csv, out_path=args.out, algorithm=args.alg,
                    colormap=args.cmap, overlay_boundaries=args.overlay)
    try:
        png, svg = render_phase_diagram(spec)
    except (SchemaError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(f"wrote {png} and {svg}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
