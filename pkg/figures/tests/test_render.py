import numpy as np
import pytest

from dwfigures import DataError, PlotJob, read_table, render

HEADER = ('# doublewell 0.1.0 config={"command":"sweep-tilt",'
          '"mode":"one-level"}')


def write_sweep_csv(path, num=21, k=3):
    lines = [HEADER, "param_value,k,eigenvalue,nu,p,sign,fidelity,excited_occ"]
    for x in np.linspace(0.0, 2.0, num):
        for kk in range(k):
            e = kk + 0.1 * np.cos(3 * x + kk)
            lines.append(f"{x},{kk},{e},0,0,+,1.0,0.0")
    path.write_text("\n".join(lines) + "\n")


def write_amplitude_csv(path, nk=5, nn=7):
    lines = ['# doublewell 0.1.0 config={"command":"spectrum","mode":"two-level"}',
             "k,n,amplitude_abs"]
    for k in range(nk):
        for n in range(nn):
            lines.append(f"{k},{n},{np.exp(-abs(n - k)):.6f}")
    path.write_text("\n".join(lines) + "\n")


def test_read_table_parses_header_and_config(tmp_path):
    p = tmp_path / "sweep.csv"
    write_sweep_csv(p)
    t = read_table(p)
    assert t.config["command"] == "sweep-tilt"
    assert t.nrows == 21 * 3
    assert t["param_value"][0] == 0.0
    with pytest.raises(DataError, match="missing"):
        t["absent_column"]


def test_read_table_rejects_empty_and_single_row(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text(HEADER + "\nparam_value,k,eigenvalue\n")
    with pytest.raises(DataError, match="no data rows"):
        read_table(p)
    p.write_text(HEADER + "\nparam_value,k,eigenvalue\n0.0,0,1.0\n")
    with pytest.raises(DataError, match="single data row"):
        read_table(p)


def test_read_table_rejects_ragged_rows(tmp_path):
    p = tmp_path / "ragged.csv"
    p.write_text("a,b\n1,2\n3\n")
    with pytest.raises(DataError, match="fields"):
        read_table(p)


def test_heatmap_renders_with_guides(tmp_path):
    src = tmp_path / "amp.csv"
    write_amplitude_csv(src)
    out = tmp_path / "fig.png"
    meta = render(PlotJob(kind="heatmap", inputs=[str(src)], output=str(out),
                          overlays={"hline": ["2,4"]}))
    assert out.exists() and out.stat().st_size > 0
    assert meta["shape"] == (7, 5)
    assert meta["hlines"] == [2.0, 4.0]
    assert "Fock index" in meta["ylabel"]
    assert "eigenstate index" in meta["xlabel"]


def test_heatmap_requires_columns(tmp_path):
    src = tmp_path / "bad.csv"
    src.write_text(HEADER + "\nk,n\n0,0\n0,1\n")
    with pytest.raises(DataError, match="amplitude_abs"):
        render(PlotJob(kind="heatmap", inputs=[str(src)],
                       output=str(tmp_path / "x.png")))
    assert not (tmp_path / "x.png").exists()


def test_heatmap_refuses_holes(tmp_path):
    src = tmp_path / "holes.csv"
    src.write_text(HEADER + "\nk,n,amplitude_abs\n0,0,1.0\n1,1,0.5\n")
    with pytest.raises(DataError, match="interpolate"):
        render(PlotJob(kind="heatmap", inputs=[str(src)],
                       output=str(tmp_path / "x.png")))


def test_eigencurves_with_overlay(tmp_path):
    src = tmp_path / "sweep.csv"
    write_sweep_csv(src)
    out = tmp_path / "curves.png"
    meta = render(PlotJob(kind="eigencurves", inputs=[str(src)],
                          output=str(out), overlays={"vline": ["0.5"]}))
    assert out.exists()
    assert meta["curves"] == 3
    assert meta["vlines"] == [0.5]
    assert meta["xlabel"].startswith("tilt")
    assert "[U0]" in meta["ylabel"]


def test_crossings_renderer(tmp_path):
    src = tmp_path / "sweep.csv"
    write_sweep_csv(src, num=41, k=2)
    out = tmp_path / "crossings.png"
    meta = render(PlotJob(kind="crossings", inputs=[str(src)],
                          output=str(out), overlays={"vline": ["0.4,0.8,1.2"]}))
    assert out.exists()
    assert meta["vlines"] == [0.4, 0.8, 1.2]


def test_rendering_is_deterministic(tmp_path):
    src = tmp_path / "amp.csv"
    write_amplitude_csv(src)
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    render(PlotJob(kind="heatmap", inputs=[str(src)], output=str(a)))
    render(PlotJob(kind="heatmap", inputs=[str(src)], output=str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_cli_entry_points(tmp_path, capsys):
    from dwfigures.cli import main_eigencurves, main_heatmap
    src = tmp_path / "sweep.csv"
    write_sweep_csv(src)
    out = tmp_path / "cli.png"
    rc = main_eigencurves(["--in", str(src), "--out", str(out),
                           "--overlay", "vline=1.0"])
    assert rc == 0 and out.exists()
    rc = main_heatmap(["--in", str(src), "--out", str(tmp_path / "no.png")])
    assert rc == 1
    assert "is missing" in capsys.readouterr().err
    assert not (tmp_path / "no.png").exists()
