import subprocess
import sys

import numpy as np
import pytest

from qss import cli, config, protocol
from qss.config import ScenarioConfig
from qss.gaussian import GaussianState


def _cfg(tmp_path, cfg, name="s.cfg"):
    p = tmp_path / name
    config.dump(cfg, p)
    return str(p)


def _csv(path):
    lines = open(path, encoding="utf-8").read().split("\n")
    header = lines[0].split(",")
    rows = [[float(x) for x in ln.split(",")] for ln in lines[1:] if ln]
    return header, np.array(rows)


def test_report_experiment(capsys):
    assert cli.main(["report"]) == 0
    out = capsys.readouterr().out
    assert "{2,3}" in out and "average fidelity" in out and "Duan product" in out
    assert "exceeded (quantum)" in out


def test_report_ideal_and_classical(tmp_path):
    _, f_avg = cli.report_text(ScenarioConfig.ideal())
    assert np.isclose(f_avg, 1.0, atol=1e-5)
    reports, _, _ = cli._structure_reports(ScenarioConfig.classical())
    _, f_avg = cli.report_text(ScenarioConfig.classical())
    assert f_avg <= 2 / 3 + 1e-9
    assert not any(r.beats_F_bound for r in reports.values())


def test_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    assert cli.main(["sweep", "--config", _cfg(tmp_path, ScenarioConfig.ideal()), "--out", str(out), "--steps", "201", "--g-max", "5.656854249"]) == 0
    header, rows = _csv(out)
    assert header == cli.SWEEP_COLUMNS
    assert np.all(np.diff(rows[:, 0]) > 0)
    best = rows[np.argmax(rows[:, 4])]
    assert np.isclose(best[4], 1.0, atol=1e-5)
    assert np.isclose(best[3], 1.0, atol=1e-6)


def test_sweep_experiment_shape():
    rows = np.array(cli.sweep_rows(ScenarioConfig.experiment(), np.linspace(0, 6, 200)), dtype=float)
    i = np.argmax(rows[:, 4])
    assert 0.6 < rows[i, 4] < 0.8
    assert 0.6 < rows[i, 3] < 1.2
    assert rows[0, 4] < rows[i, 4] and rows[-1, 4] < rows[i, 4]


def test_tv_unitary_rows(tmp_path):
    for cfg, T, V in ((ScenarioConfig.ideal(), 2.0, 0.0), (ScenarioConfig.classical(), 2 / 3, 4.0)):
        out = tmp_path / "tv.csv"
        assert cli.main(["tv", "--config", _cfg(tmp_path, cfg), "--out", str(out), "--steps", "20"]) == 0
        header, rows = _csv(out)
        assert header == cli.TV_COLUMNS
        flagged = rows[rows[:, 6] == 1]
        assert len(flagged) == 1
        assert np.isclose(flagged[0, 1], 1.0)
        assert np.isclose(flagged[0, 2], T, atol=1e-5) and np.isclose(flagged[0, 3], V, atol=1e-5)
        assert len(rows) == 21


def test_tv_experiment_beats_cloning():
    rows = np.array(cli.tv_rows(ScenarioConfig.experiment(), np.linspace(0, 6, 200)), dtype=float)
    assert np.any((rows[:, 2] > 1) & (rows[:, 3] < 1))


def test_csv_is_byte_identical(tmp_path):
    path = _cfg(tmp_path, ScenarioConfig.experiment())
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}.csv"
        assert cli.main(["tv", "--config", path, "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert b"\r" not in outs[0]


def test_fmt():
    assert cli.fmt(1 / 3) == "0.333333333"
    assert cli.fmt(123456789012.0) == "1.23456789e+11"
    assert cli.fmt(2.0) == "2"
    assert cli.fmt(True) == "1"


def test_config_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("seed = 1\nsqz1_db = oops\n")
    assert cli.main(["report", "--config", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "sqz1_db" in err
    assert cli.main(["report", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert cli.main(["sweep", "--steps", "1"]) == 2
    assert cli.main(["bounds", "--k", "4"]) == 2


def test_physicality_exit(monkeypatch, capsys):
    real = protocol.dealer_encode

    def broken(cfg):
        shares = real(cfg)
        bad = GaussianState(shares.state.mean, 0.1 * shares.state.cov)
        return protocol.ShareSet(bad, shares.secret_mean, shares.signal)

    monkeypatch.setattr(protocol, "dealer_encode", broken)
    assert cli.main(["report"]) == 3
    assert "symplectic" in capsys.readouterr().err


def test_io_error_exit(tmp_path):
    assert cli.main(["sweep", "--steps", "3", "--out", str(tmp_path / "no" / "such" / "dir.csv")]) == 4


def test_mc_validate_exits(tmp_path, capsys):
    path = _cfg(tmp_path, ScenarioConfig.ideal())
    assert cli.main(["mc-validate", "--config", path, "--shots", "20000"]) == 0
    assert "all quantities within 5 sigma" in capsys.readouterr().out
    assert cli.main(["mc-validate", "--shots", "200000", "--corrupt-coefficient", "0.05"]) == 5
    assert "MISMATCH" in capsys.readouterr().out


def test_mc_validate_reproducible(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"mc{k}.csv"
        assert cli.main(["mc-validate", "--shots", "20000", "--seed", "42", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_bounds(capsys):
    assert cli.main(["bounds"]) == 0
    assert capsys.readouterr().out == "bound,fidelity\navg,0.666666667\nasymmetric,0.5\nmz,1\n"
    assert cli.main(["bounds", "--k", "3", "--n", "5"]) == 0
    assert capsys.readouterr().out == "bound,fidelity\navg,0.6\n"


def test_raw_detection_lowers_fidelity():
    cfg = ScenarioConfig.experiment()
    _, state_level = cli.report_text(cfg)
    _, raw = cli.report_text(cfg, raw_detection=True)
    assert raw < state_level


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "qss.cli", "bounds"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("bound,fidelity")
