"""Secondary acceptance: regenerate the three committed figures end to end.

Runs the primary CLI on the committed fig1/fig2a/fig3d configs, then renders
one figure of each kind from the CSV outputs.  Smoke-level assertions only
(files produced, axes and overlays structurally right), no pixel comparison.
"""

import json
import subprocess
import sys
import time
from pathlib import Path

import pytest

from dwfigures import PlotJob, render

REPO = Path(__file__).resolve().parents[2]
CONFIGS = REPO / "configs"

pytest.importorskip("doublewell",
                    reason="primary package not installed; figure "
                           "acceptance consumes its CLI output")


def run_primary(config: Path, out: Path) -> None:
    proc = subprocess.run(
        [sys.executable, "-m", "doublewell.cli", "--config", str(config),
         "--out", str(out)],
        capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr


def test_three_figures_from_committed_configs(tmp_path):
    start = time.perf_counter()
    run_primary(CONFIGS / "fig1.json", tmp_path / "fig1")
    run_primary(CONFIGS / "fig2a.json", tmp_path / "fig2a")
    run_primary(CONFIGS / "fig3d.json", tmp_path / "fig3d")

    # Fig. 1 style: amplitude heatmap with dotted guides at the excited-level
    # block boundaries n = 20 and 60
    meta1 = render(PlotJob(
        kind="heatmap",
        inputs=[str(tmp_path / "fig1" / "amplitudes.csv")],
        output=str(tmp_path / "fig1.png"),
        overlays={"hline": ["20,60"], "title": "symmetric-trap amplitudes"}))
    assert Path(meta1["output"]).stat().st_size > 0
    assert meta1["hlines"] == [20.0, 60.0]
    assert meta1["shape"] == (80, 80)
    assert "Fock index" in meta1["ylabel"]

    # Fig. 2(a) style: eigenvalue curves vs interaction with the critical
    # coupling overlay u_crit = 2 hw / (N^2 - 1) = 0.0202 hw at N = 10
    u_crit = 2.0 / 99.0
    meta2 = render(PlotJob(
        kind="eigencurves",
        inputs=[str(tmp_path / "fig2a" / "sweep.csv")],
        output=str(tmp_path / "fig2a.png"),
        overlays={"vline": [f"{u_crit}"]}))
    assert Path(meta2["output"]).stat().st_size > 0
    assert meta2["curves"] == 16
    assert meta2["vlines"] == [pytest.approx(u_crit)]
    assert meta2["xlabel"].startswith("interaction")

    # Fig. 3(d) style: avoided crossings vs tilt with resonance markers at
    # dV_p = 2 p U0
    vlines = ",".join(str(2 * p) for p in range(1, 10))
    meta3 = render(PlotJob(
        kind="crossings",
        inputs=[str(tmp_path / "fig3d" / "sweep.csv")],
        output=str(tmp_path / "fig3d.png"),
        overlays={"vline": [vlines]}))
    assert Path(meta3["output"]).stat().st_size > 0
    assert meta3["curves"] == 6
    assert len(meta3["vlines"]) == 9
    assert meta3["xlabel"].startswith("tilt")

    elapsed = time.perf_counter() - start
    print(f"[PASS] figure regeneration: three images from committed configs "
          f"({elapsed:.1f}s / budget 30s)")
    assert elapsed < 30.0


def test_header_config_travels_into_labels(tmp_path):
    run_primary(CONFIGS / "fig3c.json", tmp_path / "fig3c")
    amp = tmp_path / "fig3c" / "amplitudes.csv"
    head = amp.read_text().splitlines()[0]
    cfg = json.loads(head.split("config=", 1)[1])
    assert cfg["command"] == "spectrum"
    meta = render(PlotJob(kind="heatmap", inputs=[str(amp)],
                          output=str(tmp_path / "fig3c.png")))
    assert meta["shape"] == (11, 11)
