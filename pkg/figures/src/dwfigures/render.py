"""The three figure kinds, rendered from doublewell CSV artifacts.

Rendering is deterministic: fixed colormap and layout, no timestamps, and the
scripts never recompute physics -- anything missing in the CSV is an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import DataError, Table, energy_axis_label, read_table, sweep_axis_label

CMAP = "viridis"
OVERLAY_STYLE = {"color": "red", "linestyle": "--", "linewidth": 1.0}
GUIDE_STYLE = {"color": "white", "linestyle": ":", "linewidth": 1.0}


@dataclass
class PlotJob:
    kind: Literal["heatmap", "eigencurves", "crossings"]
    inputs: list[str]
    output: str
    overlays: dict[str, list[float] | str] = field(default_factory=dict)


def _float_list(overlays: dict, key: str) -> list[float]:
    raw = overlays.get(key, [])
    if isinstance(raw, str):
        raw = [raw]
    out = []
    for item in raw:
        for piece in str(item).split(","):
            if piece:
                out.append(float(piece))
    return out


def render(job: PlotJob) -> dict:
    """Render one figure; returns metadata describing what was drawn."""
    if not job.inputs:
        raise DataError("no input CSV given")
    tables = [read_table(p) for p in job.inputs]
    if job.kind == "heatmap":
        meta = _render_heatmap(tables[0], job)
    elif job.kind == "eigencurves":
        meta = _render_eigencurves(tables[0], job)
    elif job.kind == "crossings":
        meta = _render_crossings(tables[0], job)
    else:
        raise DataError(f"unknown figure kind {job.kind!r}")
    return meta


def _save(fig, job: PlotJob, meta: dict) -> dict:
    out = Path(job.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=160)
    plt.close(fig)
    meta["output"] = str(out)
    return meta


def _render_heatmap(table: Table, job: PlotJob) -> dict:
    """Amplitude magnitude over (eigenstate index, Fock index), hue-coded."""
    table.require("k", "n", "amplitude_abs")
    k = table["k"].astype(int)
    n = table["n"].astype(int)
    amp = table["amplitude_abs"]
    nk, nn = k.max() + 1, n.max() + 1
    grid = np.full((nn, nk), np.nan)
    grid[n, k] = amp
    if np.isnan(grid).any():
        raise DataError(f"{table.path}: the (k, n) window is not fully "
                        "populated; refusing to interpolate")
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    mesh = ax.pcolormesh(np.arange(nk + 1) - 0.5, np.arange(nn + 1) - 0.5,
                         grid, cmap=CMAP, vmin=0.0)
    fig.colorbar(mesh, ax=ax, label="|amplitude|")
    guides = _float_list(job.overlays, "hline")
    for y in guides:
        ax.axhline(y, **GUIDE_STYLE)
    ax.set_xlabel("eigenstate index k")
    ax.set_ylabel("Fock index n")
    ax.set_title(str(job.overlays.get("title", "eigenstate amplitudes")))
    return _save(fig, job, {"kind": "heatmap", "shape": (int(nn), int(nk)),
                            "hlines": guides,
                            "xlabel": ax.get_xlabel(),
                            "ylabel": ax.get_ylabel()})


def _sweep_series(table: Table):
    table.require("param_value", "k", "eigenvalue")
    x = table["param_value"]
    k = table["k"].astype(int)
    e = table["eigenvalue"]
    series = {}
    for kk in np.unique(k):
        mask = k == kk
        series[int(kk)] = (x[mask], e[mask])
    return series


def _render_eigencurves(table: Table, job: PlotJob) -> dict:
    """Eigenvalues against the swept parameter, with critical dashed lines."""
    series = _sweep_series(table)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for kk, (x, e) in sorted(series.items()):
        ax.plot(x, e, color="steelblue", linewidth=0.9)
    vlines = _float_list(job.overlays, "vline")
    for v in vlines:
        ax.axvline(v, **OVERLAY_STYLE)
    ax.set_xlabel(sweep_axis_label(table.config))
    ax.set_ylabel(energy_axis_label(table.config))
    ax.set_title(str(job.overlays.get("title", "energy eigenvalues")))
    return _save(fig, job, {"kind": "eigencurves", "curves": len(series),
                            "vlines": vlines,
                            "xlabel": ax.get_xlabel(),
                            "ylabel": ax.get_ylabel()})


def _render_crossings(table: Table, job: PlotJob) -> dict:
    """Lowest eigenvalues against tilt; markers at the predicted resonances."""
    series = _sweep_series(table)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for kk, (x, e) in sorted(series.items()):
        ax.plot(x, e, linewidth=0.9)
    vlines = _float_list(job.overlays, "vline")
    for v in vlines:
        ax.axvline(v, **OVERLAY_STYLE)
    ax.set_xlabel(sweep_axis_label(table.config))
    ax.set_ylabel(energy_axis_label(table.config))
    ax.set_title(str(job.overlays.get("title", "avoided crossings")))
    return _save(fig, job, {"kind": "crossings", "curves": len(series),
                            "vlines": vlines,
                            "xlabel": ax.get_xlabel(),
                            "ylabel": ax.get_ylabel()})
