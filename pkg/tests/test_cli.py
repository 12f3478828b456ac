import subprocess
import sys

from deltawave import io
from deltawave.cli import main
from deltawave.experiments import ExperimentConfig


def test_riemann_subcommand(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["riemann", "--output", str(out), "--c", "0.5", "--times", "1 2"]) == 0
    header, rows = io.read_csv(out)
    assert tuple(header) == io.SCHEMAS["amplitudes"]
    assert str(out) in capsys.readouterr().out


def test_exit_statuses(tmp_path):
    out = str(tmp_path / "o.csv")
    assert main(["riemann", "--output", out, "--left", "1 0 0 0", "--right", "-1 0 0 0"]) == 5
    assert main(["riemann", "--output", out, "--eps", ""]) == 2
    assert main(["fd-run", "--output", out, "--h", "0.05", "--T", "0.1", "--dt", "1"]) == 4
    assert main(["riemann", "--config", str(tmp_path / "missing.ini")]) == 2


def test_config_file_overlay(tmp_path, capsys):
    ini = tmp_path / "e.ini"
    ExperimentConfig("measure", output="m.csv", c=0.25).save(ini)
    assert main(["riemann", "--config", str(ini), "--K", "3", "--dump-config"]) == 0
    cfg = ExperimentConfig.loads(capsys.readouterr().out)
    assert cfg.kind.value == "riemann" and cfg.c == 0.25 and cfg.K == 3.0


def test_batch_subcommand(tmp_path, capsys):
    paths = []
    for i in range(2):
        p = tmp_path / f"{i}.ini"
        ExperimentConfig("riemann", output=str(tmp_path / f"{i}.csv")).save(p)
        paths.append(str(p))
    assert main(["batch", *paths, "--workers", "2"]) == 0
    assert capsys.readouterr().out.count("status 0") == 2


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "deltawave", "riemann", "--output", str(tmp_path / "a.csv")],
                       capture_output=True, text=True)
    assert r.returncode == 0
