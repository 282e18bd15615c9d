"""Command-line surface: exit codes, file formats, reproducibility."""

import csv
import json
import math
import subprocess
import sys

import pytest

import shadowsim
from shadowsim import checks, cli

MZ_TEXT = """\
# balanced interferometer, one shifter in the upper arm
element src source
element bs1 beamsplitter
element ps phaseshifter:pi/3
element ma mirror
element mb mirror
element bs2 beamsplitter
element u detector:u
element d detector:d
link src:0 bs1:0
link bs1:0 ma:0
link ma:0 ps:0
link ps:0 bs2:0
link bs1:1 mb:0
link mb:0 bs2:1
link bs2:0 d:0
link bs2:1 u:0
"""


def _rows(path):
    with open(path, newline="") as fh:
        meta_line = fh.readline()
        assert meta_line.startswith("# ")
        meta = json.loads(meta_line[2:])
        reader = csv.DictReader(fh)
        return meta, list(reader)


# -- exit codes -----------------------------------------------------------------


def test_version_flag():
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0


def test_module_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "shadowsim.cli", "--version"],
        capture_output=True, text=True, check=True,
    )
    assert shadowsim.__version__ in proc.stdout


def test_bad_angle_exits_with_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["run", "mz", "--alpha", "banana"])
    assert exc.value.code == 2
    assert "--alpha" in capsys.readouterr().err


def test_missing_config_file_is_a_config_error(capsys):
    assert cli.main(["run", "mz", "--config", "/no/such/file.json"]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_broken_circuit_exits_three(tmp_path, capsys):
    bad = tmp_path / "bad.circuit"
    bad.write_text("element src source\nwibble\n")
    assert cli.main(["run", "circuit", "--circuit-file", str(bad)]) == 3
    err = capsys.readouterr().err
    assert "circuit error" in err
    assert "line 2" in err


def test_unstable_step_exits_four(capsys):
    code = cli.main(["propagate", "--eps", "0.05", "--steps", "1"])
    assert code == 4
    assert "instability" in capsys.readouterr().err


def test_fractional_snapshot_time_is_a_config_error(capsys):
    assert cli.main(["propagate", "--eps", "0.5", "--times", "0.7"]) == 2
    assert "whole number" in capsys.readouterr().err


def test_propagate_requires_a_time_axis(capsys):
    assert cli.main(["propagate", "--eps", "0.5"]) == 2
    assert "--steps or --times" in capsys.readouterr().err


def test_packet_against_the_wall_is_a_config_error(capsys):
    code = cli.main(["propagate", "--eps", "0.5", "--steps", "1", "--x0", "29"])
    assert code == 2
    assert "walls" in capsys.readouterr().err


# -- run ------------------------------------------------------------------------


def test_run_mz_prints_both_engine_columns(capsys):
    assert cli.main(["run", "mz", "--alpha", "0.9", "--engine", "both"]) == 0
    out = capsys.readouterr().out
    assert "streams" in out and "hilbert" in out
    assert "0.810805" in out  # cos^2(0.45)


def test_run_chsh_reports_violation(capsys):
    code = cli.main(["run", "chsh", "--angles", "0,pi/2,pi/4,3pi/4"])
    assert code == 0
    assert "S = 2.828427, VIOLATION" in capsys.readouterr().out


def test_run_circuit_file(tmp_path, capsys):
    path = tmp_path / "mz.circuit"
    path.write_text(MZ_TEXT)
    assert cli.main(["run", "circuit", "--circuit-file", str(path)]) == 0
    out = capsys.readouterr().out
    assert "0.750000" in out  # cos^2(pi/6) at the u port
    assert "0.250000" in out


def test_run_pathintegral_is_propagate(capsys):
    code = cli.main(["run", "pathintegral", "--eps", "0.5", "--steps", "2"])
    assert code == 0
    assert "t = 1" in capsys.readouterr().out


def test_config_file_supplies_values_and_flags_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"alpha": 0.9}))
    assert cli.main(["run", "mz", "--config", str(cfg)]) == 0
    assert "0.810805" in capsys.readouterr().out
    assert cli.main(["run", "mz", "--config", str(cfg), "--alpha", "0"]) == 0
    assert "1.000000" in capsys.readouterr().out


# -- sweep ----------------------------------------------------------------------


def test_sweep_csv_matches_interferometer_law(tmp_path):
    out = tmp_path / "sweep.csv"
    code = cli.main([
        "sweep", "mz", "--grid", "0:pi:9", "--engine", "streams",
        "--seed", "5", "--out", str(out),
    ])
    assert code == 0
    meta, rows = _rows(out)
    assert meta["rng"] == "numpy-pcg64"
    assert meta["config"]["experiment"] == "mz"
    assert meta["engine_versions"]["package"] == shadowsim.__version__
    seen = 0
    for row in rows:
        if row["outcome"] != "u":
            continue
        alpha = float(row["alpha"])
        assert float(row["probability"]) == pytest.approx(
            math.cos(alpha / 2) ** 2, abs=1e-9
        )
        seen += 1
    assert seen == 9


def test_sweep_reruns_are_byte_identical(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        assert cli.main([
            "sweep", "mz", "--grid", "0:pi:5", "--seed", "7",
            "--shots", "400", "--out", str(path),
        ]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_sweep_threads_do_not_change_output(tmp_path):
    serial, pooled = tmp_path / "serial.csv", tmp_path / "pooled.csv"
    base = ["sweep", "bghz", "--grid", "0:pi:8", "--seed", "3"]
    assert cli.main(base + ["--out", str(serial)]) == 0
    assert cli.main(base + ["--threads", "4", "--out", str(pooled)]) == 0
    assert serial.read_bytes() == pooled.read_bytes()


def test_sweep_chsh_traces_the_standard_curve(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "chsh", "--grid", "0:pi:7", "--out", str(out)]) == 0
    _, rows = _rows(out)
    assert len(rows) == 7
    for row in rows:
        phi = float(row["phi"])
        want = 3 * math.cos(phi) - math.cos(3 * phi)
        assert float(row["value"]) == pytest.approx(want, abs=1e-9)
        assert row["quantity"] == "S"


def test_sweep_without_grid_is_a_config_error(capsys):
    assert cli.main(["sweep", "mz"]) == 2
    assert "--grid" in capsys.readouterr().err


def test_sweep_json_output(tmp_path):
    out = tmp_path / "sweep.json"
    code = cli.main([
        "sweep", "wheeler", "--grid", "0:pi:4", "--peek",
        "--format", "json", "--out", str(out),
    ])
    assert code == 0
    blob = json.loads(out.read_text())
    assert set(blob) == {"meta", "results"}
    assert blob["meta"]["config"]["peek"] is True
    for entry in blob["results"]:
        assert entry["probability"] == pytest.approx(0.5, abs=1e-12)


# -- propagate outputs ------------------------------------------------------------


def test_propagate_csv_density_is_normalized(tmp_path, capsys):
    out = tmp_path / "packet.csv"
    code = cli.main([
        "propagate", "--eps", "0.5", "--steps", "4", "--out", str(out),
    ])
    assert code == 0
    assert "max one-step norm drift" in capsys.readouterr().out
    with open(out, newline="") as fh:
        assert fh.readline().startswith("# ")
        reader = csv.DictReader(fh)
        rows = list(reader)
    assert list(rows[0]) == ["t", "x", "density", "re", "im"]
    xs = sorted({float(r["x"]) for r in rows})
    dx = xs[1] - xs[0]
    total = sum(float(r["density"]) for r in rows) * dx
    assert total == pytest.approx(1.0, abs=1e-9)


def test_propagate_json_snapshots(tmp_path):
    out = tmp_path / "packet.json"
    code = cli.main([
        "propagate", "--eps", "0.5", "--times", "0.5,1.5",
        "--grid-n", "1024", "--xmin", "-16", "--xmax", "16",
        "--potential", "harmonic", "--omega", "0.15",
        "--format", "json", "--out", str(out),
    ])
    assert code == 0
    blob = json.loads(out.read_text())
    assert [entry["t"] for entry in blob["results"]] == [0.5, 1.5]
    for entry in blob["results"]:
        assert len(entry["x"]) == len(entry["re"]) == len(entry["im"]) == 1024


# -- check ------------------------------------------------------------------------


def test_check_command_all_green(capsys):
    code = cli.main(["check", "--corpus-cases", "3", "--shots", "5000"])
    out = capsys.readouterr().out
    assert code == 0
    lines = [line for line in out.splitlines() if line]
    assert lines[-1].endswith("checks passed")
    assert all(line.startswith("PASS") for line in lines[:-1])


def test_check_failure_flips_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(
        cli.checks, "run_all",
        lambda **kw: [checks.CheckResult("doom", False, "boom")],
    )
    assert cli.main(["check"]) == 1
    out = capsys.readouterr().out
    assert "FAIL  doom: boom" in out
    assert "0/1 checks passed" in out
