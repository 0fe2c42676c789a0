"""Command-line surface: parsing, config layering, outputs, exit codes."""

import json
import os

import pytest

from cavityqsl.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_metrics_json_object(capsys):
    code, out, err = run(
        capsys, "metrics", "--family", "lorentzian", "--lambda", "5",
        "--coupling", "2", "--delta", "0", "--tau", "1",
    )
    assert code == 0 and err == ""
    obj = json.loads(out)
    assert set(obj) == {
        "n_blp", "qslt_ratio", "final_pop", "relation_residual", "literal_ratio",
    }
    assert obj["n_blp"] > 0.0
    assert obj["relation_residual"] < 1e-9
    assert obj["literal_ratio"] == -1.0


def test_metrics_family_required(capsys):
    code, _, err = run(capsys, "metrics", "--coupling", "2")
    assert code == 2
    assert err.startswith("error: usage:")


def test_canonical_units_enforced(capsys):
    code, _, err = run(
        capsys, "metrics", "--family", "lorentzian", "--gamma0", "2", "--coupling", "1"
    )
    assert code == 2 and "gamma0" in err
    code, _, err = run(
        capsys, "metrics", "--family", "ohmic", "--omega0", "3", "--coupling", "0.5"
    )
    assert code == 2 and "omega0" in err


def test_family_foreign_flags_rejected(capsys):
    code, _, err = run(
        capsys, "metrics", "--family", "ohmic", "--delta", "2", "--coupling", "0.5"
    )
    assert code == 2 and "--delta" in err
    code, _, err = run(
        capsys, "metrics", "--family", "lorentzian", "--omega-c", "1", "--coupling", "1"
    )
    assert code == 2 and "--omega-c" in err


def test_trajectory_csv(capsys):
    code, out, _ = run(
        capsys, "trajectory", "--family", "lorentzian", "--lambda", "5",
        "--coupling", "0.1", "--tau", "1", "--steps", "10",
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "t,population,population_rate,decay_rate,frequency_shift"
    assert len(lines) == 11
    first = lines[1].split(",")
    assert float(first[0]) == 0.0 and float(first[1]) == 1.0


def test_sweep_stdout_and_json_lines(capsys):
    args = (
        "sweep", "--family", "lorentzian", "--lambda", "5", "--sweep-param",
        "coupling", "--range", "0:2", "--steps", "4", "--tau", "1", "--workers", "1",
    )
    code, out, _ = run(capsys, *args)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "param,n_blp,qslt_ratio,final_pop"
    assert len(lines) == 5

    code, out, _ = run(capsys, *args, "--format", "json-lines")
    assert code == 0
    rows = [json.loads(line) for line in out.strip().split("\n")]
    assert len(rows) == 4
    assert rows[0]["param"] == 0.0
    assert set(rows[0]) >= {"param", "n_blp", "qslt_ratio", "final_pop"}


def test_malformed_range(capsys):
    code, _, err = run(
        capsys, "sweep", "--family", "lorentzian", "--sweep-param", "coupling",
        "--range", "0,2", "--steps", "4",
    )
    assert code == 2 and "range" in err


def test_critical_json_and_no_bracket(capsys):
    code, out, _ = run(
        capsys, "critical", "--family", "ohmic", "--omega-c", "0.1",
        "--sweep-param", "coupling", "--range", "0.05:0.5", "--tau", "8.73",
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["value"] == pytest.approx(0.18, abs=0.01)
    assert obj["bracket"][1] - obj["bracket"][0] <= 1e-3
    assert obj["threshold"] == 1e-6

    code, _, err = run(
        capsys, "critical", "--family", "lorentzian", "--sweep-param", "coupling",
        "--range", "0.1:0.5", "--tau", "1",
    )
    assert code == 1
    assert err.startswith("error: no-bracket:")


def test_config_supplies_defaults_and_flags_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# shared settings\n"
        "family = lorentzian\n"
        "lambda = 5\n"
        "coupling = 2\n"
        "tau = 1\n"
    )
    code, out_cfg, _ = run(capsys, "metrics", "--config", str(cfg))
    assert code == 0
    code, out_flags, _ = run(
        capsys, "metrics", "--family", "lorentzian", "--lambda", "5",
        "--coupling", "2", "--tau", "1",
    )
    assert out_cfg == out_flags

    # an explicit flag beats the file
    code, out_override, _ = run(
        capsys, "metrics", "--config", str(cfg), "--coupling", "0.1"
    )
    assert code == 0
    assert json.loads(out_override)["n_blp"] == 0.0


def test_config_bad_line(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("family lorentzian\n")
    code, _, err = run(capsys, "metrics", "--config", str(cfg))
    assert code == 2 and "key = value" in err


def test_sweep_out_writes_manifest_roundtrip(capsys, tmp_path):
    out = tmp_path / "table.csv"
    base = (
        "sweep", "--family", "lorentzian", "--lambda", "0.5", "--delta", "3",
        "--coupling", "0.01", "--sweep-param", "delta", "--range", "0:8",
        "--steps", "5", "--tau", "1", "--workers", "1",
    )
    code, _, _ = run(capsys, *base, "--out", str(out))
    assert code == 0
    manifest = tmp_path / "table_manifest.txt"
    assert manifest.exists()
    text = manifest.read_text()
    assert "sweep-param = delta" in text and "range = 0:8" in text

    out2 = tmp_path / "replay.csv"
    code, _, _ = run(capsys, "sweep", "--config", str(manifest), "--out", str(out2))
    assert code == 0
    assert out2.read_bytes() == out.read_bytes()


def test_figure_outputs_and_config_roundtrip(capsys, tmp_path):
    d1 = tmp_path / "a"
    code, out, _ = run(
        capsys, "figure", "fig1", "--steps", "4", "--workers", "1",
        "--out", str(d1), "--no-plots",
    )
    assert code == 0
    csvs = sorted(p for p in os.listdir(d1) if p.endswith(".csv"))
    assert csvs == ["fig1_lambda_0p01.csv", "fig1_lambda_5.csv"]
    assert (d1 / "fig1_manifest.txt").exists()
    assert not any(p.endswith(".png") for p in os.listdir(d1))

    d2 = tmp_path / "b"
    code, _, _ = run(
        capsys, "figure", "--config", str(d1 / "fig1_manifest.txt"),
        "--out", str(d2), "--no-plots",
    )
    assert code == 0
    for name in csvs:
        assert (d2 / name).read_bytes() == (d1 / name).read_bytes()


def test_figure_renders_plots(capsys, tmp_path):
    code, _, _ = run(
        capsys, "figure", "fig3", "--steps", "3", "--tau", "2",
        "--workers", "1", "--out", str(tmp_path),
    )
    assert code == 0
    names = set(os.listdir(tmp_path))
    assert "fig3_non_markovianity.png" in names
    assert "fig3_qslt_ratio.png" in names


def test_figure_unknown_id(capsys):
    code, _, err = run(capsys, "figure", "fig9")
    assert code == 2


def test_worker_count_does_not_change_bytes(capsys, tmp_path):
    outs = []
    for w, name in ((1, "w1"), (3, "w3")):
        d = tmp_path / name
        code, _, _ = run(
            capsys, "figure", "fig1", "--steps", "6", "--workers", str(w),
            "--out", str(d), "--no-plots",
        )
        assert code == 0
        outs.append((d / "fig1_lambda_5.csv").read_bytes())
    assert outs[0] == outs[1]


def test_oracle_check_table(capsys):
    code, out, err = run(capsys, "oracle-check", "--workers", "2")
    assert code == 0, err
    lines = [line for line in out.strip().split("\n") if line]
    assert all("pass" in line for line in lines)
    assert any("rates" in line for line in lines)
    assert any("pair" in line for line in lines)


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == 0
    assert run(capsys, "sweep", "--help")[0] == 0
