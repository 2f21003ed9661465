import csv
import io

import numpy as np
import pytest

from qdcorr.cli import main
from qdcorr.config import format_state, parse_state
from qdcorr.sweep import read_csv_body

CONFIG = """\
omega_ev = 0
jz_ev = 0.004
dipole_e_nm = 0.1
field_v_per_m = 25e6
temperature_k = 14
nu = 0.5
"""


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "point.cfg"
    path.write_text(CONFIG)
    return str(path)


def test_state_prints_a_loadable_state(config, capsys):
    assert main(["state", "--config", config]) == 0
    out = capsys.readouterr().out
    rho = parse_state(out)
    assert abs(np.trace(rho).real - 1) <= 1e-12
    assert "# concurrence:" in out and "# discord:" in out


def test_state_strict_prints_printed_entries(config, capsys):
    assert main(["state", "--config", config, "--strict"]) == 0
    out = capsys.readouterr().out
    values = [complex(t) for line in out.splitlines() if not line.startswith("#") for t in line.split()]
    assert len(values) == 16
    assert abs(sum(values[::5]).real - 1) > 0.1
    assert "trace - 1" in out


def test_config_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense_key = 3\n")
    assert main(["state", "--config", str(bad)]) == 2
    assert "nonsense_key" in capsys.readouterr().err
    assert main(["state", "--config", str(tmp_path / "missing.cfg")]) == 2
    bad.write_text("temperature_k = -3\n")
    assert main(["state", "--config", str(bad)]) == 2
    spec = tmp_path / "spec.cfg"
    spec.write_text("axis1 = speed, 0, 1, 3\n")
    assert main(["sweep", "--spec", str(spec)]) == 2
    assert "speed" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--figure", "7"])
    assert exc.value.code == 2


def test_discord_command_on_state_file(tmp_path, capsys):
    rho = np.diag([0.1, 0.4, 0.3, 0.2]).astype(complex)
    rho[1, 2] = rho[2, 1] = 0.3
    path = tmp_path / "rho.txt"
    path.write_text(format_state(rho))
    assert main(["discord", "--rho", str(path), "--method", "both"]) == 0
    out = dict(line.split(": ", 1) for line in capsys.readouterr().out.splitlines())
    assert float(out["discord_gap"].split()[0]) <= 1e-6
    assert float(out["concurrence"]) == pytest.approx(2 * (0.3 - np.sqrt(0.02)), abs=1e-10)


def test_discord_command_rejects_bad_input(tmp_path):
    path = tmp_path / "rho.txt"
    path.write_text("1 0 0 0\n")
    assert main(["discord", "--rho", str(path)]) == 2
    g = np.arange(16.0).reshape(4, 4)
    rho = g @ g.T
    rho /= np.trace(rho)
    path.write_text(format_state(rho))
    assert main(["discord", "--rho", str(path), "--method", "x-formula"]) == 2
    assert main(["discord", "--rho", str(path), "--method", "numeric"]) == 0


def test_sweep_spec_writes_csv(tmp_path):
    spec = tmp_path / "spec.cfg"
    out = tmp_path / "out.csv"
    spec.write_text("omega_ev = 0\njz_ev = 0.004\naxis1 = T, 10, 20, 2\naxis2 = nu: 0, 1\n"
                    f"output = {out}\n")
    assert main(["sweep", "--spec", str(spec)]) == 0
    rows = list(csv.DictReader(io.StringIO(read_csv_body(out.read_text()))))
    assert len(rows) == 4


def test_sweep_figure_with_check_and_plot_script(tmp_path, capsys):
    out = tmp_path / "fig2.csv"
    assert main(["sweep", "--figure", "2", "--check", "--output", str(out), "--plot-script"]) == 0
    assert "[FAIL]" not in capsys.readouterr().err
    assert (tmp_path / "fig2_plot.py").exists()
    assert main(["sweep", "--figure", "2", "--plot-script"]) == 2


def test_sweep_body_independent_of_worker_env(tmp_path, monkeypatch):
    bodies = []
    for workers in ("1", "4"):
        monkeypatch.setenv("QDCORR_WORKERS", workers)
        out = tmp_path / f"f4_{workers}.csv"
        assert main(["sweep", "--figure", "4", "--output", str(out)]) == 0
        bodies.append(read_csv_body(out.read_text()))
    assert bodies[0] == bodies[1]


def test_rtn_oracle_csv(tmp_path):
    out = tmp_path / "rtn.csv"
    args = ["rtn-oracle", "--tau", "0.5", "--nu-max", "4", "--trajectories", "50000", "--seed", "7",
            "--output", str(out)]
    assert main(args) == 0
    rows = list(csv.DictReader(io.StringIO(read_csv_body(out.read_text()))))
    assert list(rows[0]) == ["nu", "estimated_coherence", "stderr", "analytic_lambda"]
    assert len(rows) == 9
    for r in rows:
        z = abs(float(r["estimated_coherence"]) - float(r["analytic_lambda"]))
        assert z <= 4 * float(r["stderr"]) + 1e-15
    first = out.read_text()
    assert main(args) == 0
    assert out.read_text() == first
    assert main(["rtn-oracle", "--trajectories", "10"]) == 2


def test_validate_passes_and_fault_fails(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "[FAIL]" not in out and "source discrepancy" in out
    assert main(["validate", "--inject-fault", "lambda-overshoot"]) == 1
    out = capsys.readouterr().out
    assert "InvalidAmplitudeError" in out
