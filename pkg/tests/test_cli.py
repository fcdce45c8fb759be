import pytest

from cohqec.cli import cli
from cohqec.experiments import read_curve


def test_simulate_writes_curve(tmp_path):
    out = tmp_path / "sim.csv"
    code = cli(
        [
            "simulate",
            "--code", "rep:3",
            "--noise", "disc:x:p=0.01",
            "--strategy", "active",
            "--cycles", "5",
            "--trials", "500",
            "--seed", "7",
            "--out", str(out),
        ]
    )
    assert code == 0
    curve = read_curve(str(out))
    assert len(curve.cycles) == 5
    assert curve.metadata["seed"] == "7"


def test_simulate_with_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("code=rep:3\nnoise=disc:x:p=0.02\ncycles=3\ntrials=50\nseed=1\n")
    out = tmp_path / "sim.csv"
    assert cli(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    curve = read_curve(str(out))
    assert curve.metadata["noise"] == "disc:x:p=0.02"
    # explicit flags override config values
    out2 = tmp_path / "sim2.csv"
    assert cli(["simulate", "--config", str(cfg), "--seed", "9", "--out", str(out2)]) == 0
    assert read_curve(str(out2)).metadata["seed"] == "9"


def test_predict_discrete_final_row(tmp_path, capsys):
    out = tmp_path / "pred.csv"
    code = cli(
        ["predict", "--model", "discrete", "--d", "3", "--p", "0.001", "--a", "3",
         "--cycles", "100", "--out", str(out)]
    )
    assert code == 0
    curve = read_curve(str(out))
    assert curve.mean[-1] == pytest.approx(3e-4, rel=1e-12)
    assert curve.metadata["source"] == "discrete"


def test_fit_subcommand(tmp_path, capsys):
    out = tmp_path / "pred.csv"
    cli(["predict", "--model", "discrete", "--d", "3", "--p", "0.001", "--a", "3",
         "--cycles", "50", "--out", str(out)])
    assert cli(["fit", "--in", str(out)]) == 0
    captured = capsys.readouterr().out
    assert captured.startswith("A=")
    a_val = float(captured.splitlines()[0].split()[0].split("=")[1])
    assert a_val == pytest.approx(3e-6, rel=1e-9)


def test_count_malignant_output(capsys):
    assert cli(["count-malignant", "--code", "rep:5", "--axis", "x"]) == 0
    line = capsys.readouterr().out.strip()
    assert "a_d=10" in line and "b_d=16" in line and "tie_break=" in line


def test_alpha_dist_output(tmp_path):
    out = tmp_path / "alpha.csv"
    assert cli(["alpha-dist", "--code", "rep:3", "--angle", "0.05", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    rows = [l for l in lines if l and not l.startswith("#") and not l.startswith("syndrome")]
    assert len(rows) == 4
    probs = [float(r.split(",")[1]) for r in rows]
    assert sum(probs) == pytest.approx(1.0, abs=1e-10)


def test_unknown_flag_is_usage_error(capsys):
    assert cli(["simulate", "--frobnicate", "1"]) == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_missing_required_is_usage_error():
    assert cli(["simulate"]) == 1
    assert cli(["predict", "--model", "discrete"]) == 1
    assert cli(["nonsense"]) == 1


def test_runtime_error_exit_code(tmp_path):
    assert cli(["fit", "--in", str(tmp_path / "does_not_exist.csv")]) == 2


def test_bad_config_values_are_usage_errors(tmp_path):
    assert (
        cli(["simulate", "--code", "rep:4", "--noise", "none", "--out", str(tmp_path / "x.csv")])
        == 1
    )
    assert (
        cli(["simulate", "--code", "rep:3", "--noise", "zzz", "--out", str(tmp_path / "x.csv")])
        == 1
    )
