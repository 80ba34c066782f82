"""Render figures from a finished run directory.

Reads the delimited artifacts a run leaves behind (diagnostics.jsonl and the
snapshot files) and writes PNGs next to them: density growth and contrast
curves over time, and the final density field as a line plot (1D), heatmap
(2D) or mid-plane slice (3D).
"""

from __future__ import annotations

import glob
import os
import re

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .core import ConfigError
from .snapshots import read_diagnostics, read_snapshot

__all__ = ["render_report", "latest_snapshot"]

_SNAP_RE = re.compile(r"snapshot_(\d+)\.csv$")


def latest_snapshot(run_dir: str) -> str | None:
    paths = glob.glob(os.path.join(run_dir, "snapshot_*.csv"))
    numbered = [(int(m.group(1)), p) for p in paths if (m := _SNAP_RE.search(p))]
    return max(numbered)[1] if numbered else None


def _fluid_series(records: list, key: str) -> list[np.ndarray]:
    n_fluids = len(records[0]["fluids"])
    return [np.array([rec["fluids"][f][key] for rec in records]) for f in range(n_fluids)]


def _plot_series(records, key, ylabel, path):
    t = np.array([rec["t"] for rec in records])
    fig, ax = plt.subplots(figsize=(6, 4))
    series = _fluid_series(records, key)
    for f, values in enumerate(series):
        label = f"fluid {f}" if len(series) > 1 else None
        ax.plot(t, values, label=label)
    top = max(v.max() for v in series)
    bottom = min(v.min() for v in series)
    if bottom > 0 and top / bottom > 50:
        ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel)
    if len(series) > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _plot_density(run, path):
    grid = run.grid
    fig, ax = plt.subplots(figsize=(6, 4.5))
    if grid.dim == 1:
        x = grid.centers(0)
        for f, fluid in enumerate(run.fluids):
            label = f"fluid {f}" if len(run.fluids) > 1 else None
            ax.plot(x, fluid.state.rho, drawstyle="steps-mid", label=label)
        ax.set_xlabel("x")
        ax.set_ylabel("rho")
        if len(run.fluids) > 1:
            ax.legend()
    else:
        rho = sum(f.state.rho for f in run.fluids)
        if grid.dim == 3:
            rho = rho[:, :, rho.shape[2] // 2]
        x0, x1 = grid.extent(0)
        y0, y1 = grid.extent(1)
        im = ax.imshow(rho.T, origin="lower", extent=(x0, x1, y0, y1),
                       cmap="inferno", interpolation="nearest")
        fig.colorbar(im, ax=ax, label="rho")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    ax.set_title(f"t = {run.t:.4g}, a = {run.bg.scale_at(run.t):.4g}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report(run_dir: str) -> list[str]:
    """Write growth, contrast and density figures; returns the written paths."""
    written = []
    diag_path = os.path.join(run_dir, "diagnostics.jsonl")
    if os.path.exists(diag_path):
        records = read_diagnostics(diag_path)
        if records:
            for key, ylabel, name in (("max_rho", "max rho", "growth.png"),
                                      ("contrast", "density contrast", "contrast.png")):
                out = os.path.join(run_dir, name)
                _plot_series(records, key, ylabel, out)
                written.append(out)
    snap = latest_snapshot(run_dir)
    if snap is not None:
        out = os.path.join(run_dir, "density.png")
        _plot_density(read_snapshot(snap), out)
        written.append(out)
    if not written:
        raise ConfigError(f"no run artifacts found in {run_dir!r} "
                          "(expected diagnostics.jsonl or snapshot_*.csv)")
    return written
