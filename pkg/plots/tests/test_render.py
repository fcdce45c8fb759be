import numpy as np
import pytest

from qecplot.cli import cli
from qecplot.io import read_series
from qecplot.render import PlotSpec, SeriesSpec, render_overlay, render_scaling_panel


def write_sim_csv(path, n=20, zero_first=False):
    lines = ["# source=simulation", "# code=rep:3", "cycle,mean_failure,std_error,trials"]
    for c in range(1, n + 1):
        mean = 0.0 if (zero_first and c == 1) else 1e-4 * c
        lines.append(f"{c},{mean},{1e-6 * c},1000")
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def write_pred_csv(path, n=20):
    lines = ["# source=discrete", "cycle,mean_failure,std_error,trials,source"]
    for c in range(1, n + 1):
        lines.append(f"{c},{1.1e-4 * c},0.0,0,discrete")
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_read_series_both_schemas(tmp_path):
    sim = read_series(write_sim_csv(tmp_path / "sim.csv"))
    assert not sim.is_prediction
    assert len(sim.cycles) == 20
    pred = read_series(write_pred_csv(tmp_path / "pred.csv"))
    assert pred.is_prediction
    assert np.all(pred.trials == 0)


def test_read_series_rejects_schema_mismatch(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("cycle,mean_failure,trials\n1,0.1,10\n")
    with pytest.raises(ValueError):
        read_series(str(bad))
    bad.write_text("cycle,mean_failure,std_error,trials\n1,0.1\n")
    with pytest.raises(ValueError):
        read_series(str(bad))
    bad.write_text("# only=metadata\n")
    with pytest.raises(ValueError):
        read_series(str(bad))


def test_render_overlay_writes_nonzero_image(tmp_path):
    sim = write_sim_csv(tmp_path / "sim.csv")
    pred = write_pred_csv(tmp_path / "pred.csv")
    out = tmp_path / "fig.png"
    spec = PlotSpec(
        series=[SeriesSpec(sim, "simulated"), SeriesSpec(pred, "predicted")],
        out=str(out),
    )
    dropped = render_overlay(spec)
    assert dropped == 0
    assert out.exists() and out.stat().st_size > 0


def test_render_overlay_logy_drops_zeros(tmp_path):
    sim = write_sim_csv(tmp_path / "sim.csv", zero_first=True)
    out = tmp_path / "fig.png"
    spec = PlotSpec(series=[SeriesSpec(sim, "simulated")], out=str(out), logy=True)
    assert render_overlay(spec) == 1
    assert out.stat().st_size > 0


def test_render_panel(tmp_path):
    sim = write_sim_csv(tmp_path / "sim.csv")
    pred = write_pred_csv(tmp_path / "pred.csv")
    out = tmp_path / "panel.png"
    panels = [
        PlotSpec(series=[SeriesSpec(sim, "sim")], out=str(out), title="left"),
        PlotSpec(series=[SeriesSpec(pred, "pred")], out=str(out), title="right"),
    ]
    render_scaling_panel(panels, str(out))
    assert out.stat().st_size > 0


def test_empty_inputs_rejected(tmp_path):
    with pytest.raises(ValueError):
        PlotSpec(series=[], out=str(tmp_path / "x.png"))
    with pytest.raises(ValueError):
        render_scaling_panel([], str(tmp_path / "x.png"))


def test_cli_overlay_and_exit_codes(tmp_path):
    sim = write_sim_csv(tmp_path / "sim.csv")
    pred = write_pred_csv(tmp_path / "pred.csv")
    out = tmp_path / "fig.png"
    assert cli(["overlay", "--in", f"{sim}:simulated", "--in", f"{pred}:predicted",
                "--out", str(out), "--logy"]) == 0
    assert out.stat().st_size > 0
    assert cli(["overlay", "--in", f"{tmp_path}/missing.csv:x", "--out", str(out)]) == 1
    assert cli(["overlay", "--out", str(out)]) == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("not,a,curve\n1,2,3\n")
    assert cli(["overlay", "--in", f"{bad}:x", "--out", str(out)]) == 2


def test_cli_panel(tmp_path):
    sim = write_sim_csv(tmp_path / "sim.csv")
    pred = write_pred_csv(tmp_path / "pred.csv")
    out = tmp_path / "panel.png"
    assert cli([
        "panel",
        "--panel", f"active={sim}:sim",
        "--panel", f"passive={pred}:pred",
        "--out", str(out),
    ]) == 0
    assert out.stat().st_size > 0


def test_rendering_does_not_mutate_inputs(tmp_path):
    sim_path = tmp_path / "sim.csv"
    write_sim_csv(sim_path)
    before = sim_path.read_text()
    out = tmp_path / "fig.png"
    render_overlay(PlotSpec(series=[SeriesSpec(str(sim_path), "s")], out=str(out)))
    assert sim_path.read_text() == before
