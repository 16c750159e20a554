"""Figure rendering for experiment outputs.

Every figure is derived from a table the experiment already wrote, never
from in-memory state, so a saved results directory can always be re-rendered.
The Agg backend keeps this usable on headless machines.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .io_utils import atomic_write_text  # noqa: E402


def read_table(path: Path) -> dict[str, list]:
    """Load one of our delimited tables into per-column lists.

    Numeric columns come back as floats; anything unparseable stays a string.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    header, data = rows[0], rows[1:]
    columns: dict[str, list] = {name: [] for name in header}
    for row in data:
        for name, cell in zip(header, row):
            try:
                columns[name].append(float(cell))
            except ValueError:
                columns[name].append(cell)
    return columns


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def _render_qb_compare(table: Path) -> list[Path]:
    cols = read_table(table)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(cols["topology"], cols["qb"], color="tab:blue")
    ax.set_yscale("log")
    ax.set_xlabel("topology")
    ax.set_ylabel("variance bound 1/Q")
    ax.set_title("Quantum bound by network layout")
    return [_save(fig, table.with_suffix(".png"))]


def _render_depth(table: Path, depth_col: str, bound_col: str, ref_col: str | None) -> list[Path]:
    cols = read_table(table)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(cols[depth_col], cols[bound_col], "o-", label=bound_col)
    if ref_col and ref_col in cols:
        ax.axhline(cols[ref_col][0], ls="--", color="tab:gray", label=ref_col)
    ax.set_yscale("log")
    ax.set_xlabel(f"{depth_col} (layers)")
    ax.set_ylabel("variance bound")
    ax.legend()
    return [_save(fig, table.with_suffix(".png"))]


def _render_sweep(table: Path) -> list[Path]:
    cols = read_table(table)
    x_name = "delta" if table.stem.endswith("delta") else "alpha"
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in ("qb", "cb"):
        if name in cols:
            ax.plot(cols[x_name], cols[name], "o-", label=name)
    if x_name == "delta":
        ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(f"{x_name} (radians)")
    ax.set_ylabel("variance bound")
    ax.legend()
    return [_save(fig, table.with_suffix(".png"))]


def _render_bayes_summary(table: Path) -> list[Path]:
    cols = read_table(table)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.semilogx(cols["nu"], cols["bias"], "o-")
    ax1.axhline(0.0, ls=":", color="tab:gray")
    ax1.set_xlabel("shots")
    ax1.set_ylabel("bias (radians)")
    ax2.loglog(cols["nu"], cols["variance"], "o-", label="posterior variance")
    ax2.loglog(cols["nu"], cols["qb_over_nu"], "--", label="QB/nu")
    ax2.loglog(cols["nu"], cols["cb_over_nu"], ":", label="CB/nu")
    ax2.set_xlabel("shots")
    ax2.set_ylabel("variance (radians^2)")
    ax2.legend()
    return [_save(fig, table.with_suffix(".png"))]


def _render_bayes_posteriors(table: Path) -> list[Path]:
    cols = read_table(table)
    fig, ax = plt.subplots(figsize=(6, 4))
    nus = sorted(set(cols["nu"]))
    for nu in nus:
        xs = [d for n, d in zip(cols["nu"], cols["delta"]) if n == nu]
        ws = [w for n, w in zip(cols["nu"], cols["weight"]) if n == nu]
        ax.plot(xs, ws, label=f"nu={int(nu)}")
    ax.set_xlabel("delta (radians)")
    ax.set_ylabel("posterior weight")
    ax.legend()
    return [_save(fig, table.with_suffix(".png"))]


def _render_noise(table: Path) -> list[Path]:
    cols = read_table(table)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(cols["lambda"], cols["qb"], "o-")
    ax.set_xlabel("dephasing strength")
    ax.set_ylabel("variance bound 1/Q")
    ax.ticklabel_format(axis="y", useOffset=False, style="plain")
    return [_save(fig, table.with_suffix(".png"))]


def render(experiment: str, tables: list[Path]) -> list[Path]:
    """Produce the figures for one experiment's tables; returns written paths."""
    figures: list[Path] = []
    for table in tables:
        stem = table.stem
        if stem == "qb_compare":
            figures += _render_qb_compare(table)
        elif stem == "qb_depth":
            figures += _render_depth(table, "l1", "qb", None)
        elif stem == "cb_depth":
            figures += _render_depth(table, "l2", "cb", "qb")
        elif stem in ("qb_vs_delta", "qb_vs_alpha", "cb_vs_delta", "cb_vs_alpha"):
            figures += _render_sweep(table)
        elif stem == "bayes_summary":
            figures += _render_bayes_summary(table)
        elif stem == "bayes_posteriors":
            figures += _render_bayes_posteriors(table)
        elif stem == "noise_sweep":
            figures += _render_noise(table)
        # topology-list is a catalog; nothing to draw
    return figures


_PLOT_SCRIPT = '''\
#!/usr/bin/env python3
"""Standalone plotter for the tables in this directory.

Regenerates a quick-look figure for every .csv written by the experiment
driver, without importing the package that produced them.
"""
import csv
import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(__file__).parent
for path in sorted(here.glob("*.csv")):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    header, data = rows[0], rows[1:]
    cols = {h: [] for h in header}
    for row in data:
        for h, cell in zip(header, row):
            try:
                cols[h].append(float(cell))
            except ValueError:
                cols[h].append(cell)
    numeric = [h for h in header if cols[h] and isinstance(cols[h][0], float)]
    if not numeric:
        continue
    fig, ax = plt.subplots(figsize=(6, 4))
    x = numeric[0]
    if isinstance(cols[header[0]][0], str):
        ax.bar(cols[header[0]], cols[numeric[-2] if len(numeric) > 1 else numeric[0]])
        ax.set_xlabel(header[0])
    else:
        for y in numeric[1:] or numeric:
            ax.plot(cols[x], cols[y], "o-", label=y)
        ax.set_xlabel(x)
        ax.legend()
    out = path.with_name(path.stem + "_quicklook.png")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    print(out)
'''


def emit_plot_script(output_dir: Path) -> Path:
    """Write a dependency-light script that re-plots the directory's tables."""
    path = Path(output_dir) / "plot.py"
    atomic_write_text(path, _PLOT_SCRIPT)
    return path
