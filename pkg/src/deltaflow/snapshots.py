"""Snapshot and diagnostics files.

A snapshot is comma-separated text with a one-line JSON header: run metadata
plus the column list, then one row per cell in row-major order.  Velocity
columns use the literal token ``nan`` where a cell holds no matter; density
columns never carry it.  Floats are written with shortest-round-trip
precision, so write -> read is lossless and identical runs produce
byte-identical files.

Diagnostics are JSON-lines, one record per sampled step, directly plottable
as max-density or contrast growth curves.
"""

from __future__ import annotations

import json

import numpy as np

from .core import (
    Background,
    ConfigError,
    FluidState,
    Grid,
    PowerLawBackground,
    StateLaw,
    StaticBackground,
    TabulatedBackground,
)
from .orchestrator import Fluid, RunState

__all__ = ["write_snapshot", "read_snapshot", "emit_diagnostics_stream",
           "read_diagnostics", "snapshot_columns"]

_AXES = "xyz"


def snapshot_columns(dim: int, n_fluids: int, with_phi: bool) -> list[str]:
    """Stable column order: indices, then per-fluid rho and u, then phi."""
    cols = list("ijk"[:dim])
    for f in range(n_fluids):
        cols.append(f"rho{f}")
        cols += [f"u{f}{_AXES[ax]}" for ax in range(dim)]
    if with_phi:
        cols.append("phi")
    return cols


def _background_meta(bg: Background) -> dict:
    if isinstance(bg, PowerLawBackground):
        return {"kind": "power_law", "p": bg.p, "t0": bg.t0}
    if isinstance(bg, TabulatedBackground):
        return {"kind": "tabulated", "times": list(bg.times), "values": list(bg.values)}
    return {"kind": "static"}


def _background_from_meta(meta: dict) -> Background:
    kind = meta.get("kind", "static")
    if kind == "power_law":
        return PowerLawBackground(p=meta["p"], t0=meta["t0"])
    if kind == "tabulated":
        return TabulatedBackground(meta["times"], meta["values"])
    return StaticBackground()


def _law_meta(law: StateLaw) -> dict:
    return {"kind": law.kind, "kappa": law.kappa, "c_light": law.c_light}


def write_snapshot(run: RunState, path: str) -> None:
    """Write the run's fields; the header carries everything read needs."""
    grid = run.grid
    dim = grid.dim
    with_phi = run.phi is not None
    cols = snapshot_columns(dim, len(run.fluids), with_phi)
    header = {
        "t": run.t,
        "n": run.n,
        "a": run.bg.scale_at(run.t),
        "model": "multifluid" if len(run.fluids) > 1 else run.fluids[0].kind,
        "grid": {"n": list(grid.n), "h": grid.h, "boundary": grid.boundary,
                 "margin": grid.margin, "origin": list(grid.origin)},
        "background": _background_meta(run.bg),
        "fluids": [{"kind": f.kind, "law": _law_meta(f.law),
                    "source_factor": f.source_factor, "floor": f.state.floor}
                   for f in run.fluids],
        "columns": cols,
    }

    columns = []
    for idx in np.indices(grid.shape).reshape(dim, -1):
        columns.append(idx.astype(float))
    for fluid in run.fluids:
        state = fluid.state
        defined = state.defined()
        columns.append(state.rho.ravel())
        u = state.velocity()
        for ax in range(dim):
            columns.append(np.where(defined, u[ax], np.nan).ravel())
    if with_phi:
        columns.append(run.phi.ravel())

    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(header) + "\n")
            index_width = dim
            for row in zip(*columns):
                cells = [str(int(v)) for v in row[:index_width]]
                cells += [repr(float(v)) for v in row[index_width:]]
                fh.write(",".join(cells) + "\n")
    except OSError as exc:
        raise ConfigError(f"cannot write snapshot {path!r}: {exc}") from exc


def read_snapshot(path: str) -> RunState:
    """Rebuild a RunState from a snapshot file (history starts empty).

    Momenta are recomputed as rho * u; cells whose velocity was written as
    ``nan`` come back with zero momentum and stay undefined.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read snapshot {path!r}: {exc}") from exc
    except (json.JSONDecodeError, ValueError) as exc:
        raise ConfigError(f"snapshot {path!r} is malformed: {exc}") from exc

    gmeta = header["grid"]
    grid = Grid(n=tuple(gmeta["n"]), h=gmeta["h"], boundary=gmeta["boundary"],
                margin=gmeta["margin"], origin=tuple(gmeta["origin"]))
    dim = grid.dim
    shape = grid.shape
    if data.shape[0] != int(np.prod(shape)):
        raise ConfigError(f"snapshot {path!r} has {data.shape[0]} rows, "
                          f"grid needs {int(np.prod(shape))}")

    col = dim  # skip index columns; rows are row-major by contract
    fluids = []
    for fmeta in header["fluids"]:
        rho = data[:, col].reshape(shape)
        col += 1
        u = data[:, col:col + dim].T.reshape((dim,) + shape)
        col += dim
        mom = np.where(np.isfinite(u), u, 0.0) * rho[np.newaxis]
        state = FluidState(rho, mom, floor=fmeta["floor"])
        law = StateLaw(fmeta["law"]["kind"], kappa=fmeta["law"]["kappa"],
                       c_light=fmeta["law"]["c_light"])
        fluids.append(Fluid(state, fmeta["kind"], law, fmeta["source_factor"]))

    phi = data[:, col].reshape(shape) if col < data.shape[1] else None
    return RunState(fluids=fluids, grid=grid, bg=_background_from_meta(header["background"]),
                    t=header["t"], n=header["n"], phi=phi)


def emit_diagnostics_stream(history: list, path: str) -> None:
    """One JSON record per line; raises on an empty history."""
    if not history:
        raise ConfigError("diagnostics history is empty; nothing to write")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for entry in history:
                fh.write(json.dumps(entry) + "\n")
    except OSError as exc:
        raise ConfigError(f"cannot write diagnostics {path!r}: {exc}") from exc


def read_diagnostics(path: str) -> list:
    """Inverse of emit_diagnostics_stream."""
    records = []
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
    except OSError as exc:
        raise ConfigError(f"cannot read diagnostics {path!r}: {exc}") from exc
    return records
