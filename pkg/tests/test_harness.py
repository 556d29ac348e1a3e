import csv
import math

import numpy as np
import pytest

from ebflow.cli import main
from ebflow.errors import ConfigError, InsufficientOscillations
from ebflow.harness import (OscillationRecord, analytic_period_2d, analytic_period_3d, extract_period,
                            load_config, parse_config)
from ebflow.harness.config import DEFAULT_MESHES, RunConfig
from ebflow.harness.scenarios import run


def test_analytic_periods():
    assert analytic_period_2d(2, 0.5, 1.0, 0.05, 0.8) == pytest.approx(2.6598, abs=1e-4)
    assert analytic_period_2d(2, 0.5, 1.0, 1e-300, 0.8) == pytest.approx(2.5957, abs=1e-4)
    assert analytic_period_2d(2, 0.0, 1.0, 0.05, 0.8) == math.inf
    T = analytic_period_2d(3, 0.5, 1.0, 0.05, 0.8)
    assert T == pytest.approx(2.6598 * math.sqrt(6 / 24), rel=1e-4)
    assert analytic_period_2d(2, 2.0, 1.0, 0.05, 0.8) == pytest.approx(2.6598 / 2, rel=1e-4)
    with pytest.raises(ValueError):
        analytic_period_2d(1, 0.5, 1.0, 0.05, 0.8)
    T3 = analytic_period_3d(2, 1.0, 1.0, 0.0)
    assert T3 == pytest.approx(2 * math.pi / math.sqrt(8.0), rel=1e-12)


def _record(t, r):
    rec = OscillationRecord()
    for a, b in zip(t, r):
        rec.append(a, b)
    return rec


def test_extract_period_synthetic():
    t = np.arange(0, 10, 0.01)
    rec = _record(t, 0.8 + 0.05 * np.cos(2 * np.pi * t / 2.5))
    assert extract_period(rec, 2.5) == pytest.approx(2.5, abs=1e-3)
    assert len(rec.extrema) >= 7
    damped = 0.8 + 0.05 * np.exp(-0.1 * t) * np.cos(2 * np.pi * t / 2.5)
    assert extract_period(_record(t, damped), 2.5) == pytest.approx(2.5, rel=1e-2)


def test_extract_period_failures():
    t = np.linspace(0, 5, 200)
    with pytest.raises(InsufficientOscillations):
        extract_period(_record(t, 1 + t))
    with pytest.raises(InsufficientOscillations):
        extract_period(_record(t, np.ones_like(t)))
    with pytest.raises(InsufficientOscillations):
        extract_period(_record(t[:2], t[:2]))


def test_config_parsing(tmp_path):
    cfg = parse_config("scenario = laplace_droplet  # comment\n\nsigma = 0.25\nmeshes = 8, 16\n")
    assert cfg.scenario == "laplace_droplet" and cfg.sigma == 0.25 and cfg.meshes == (8, 16)
    assert RunConfig(scenario="bubble2d").meshes == DEFAULT_MESHES["bubble2d"]
    path = tmp_path / "c.cfg"
    path.write_text("scheme = pm1_cn\n")
    assert load_config(path, scenario="bubble2d").scheme == "pm1_cn"
    for bad in ("nonsense line", "foo = 1", "sigma = abc", "sigma = -1", "meshes = 20, 10",
                "scheme = rk4", "scenario = x", "sigma = 1\nsigma = 2", "t_end = 0", "domain = 2, 0"):
        with pytest.raises(ConfigError):
            parse_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["geometry_check", "--mesh", "8,16", "--out", str(tmp_path / "g")]) == 0
    assert "perimeter" in capsys.readouterr().out
    assert main(["geometry_check", "--mesh", "16,8", "--out", str(tmp_path / "g")]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("bogus = 1\n")
    assert main(["bubble2d", "--config", str(bad)]) == 2
    cfg = tmp_path / "s0.cfg"
    cfg.write_text("sigma = 0\nt_end = 0.3\n")
    assert main(["bubble2d", "--config", str(cfg), "--mesh", "10", "--out", str(tmp_path / "b")]) == 3
    assert "InsufficientOscillations" in capsys.readouterr().err


def test_summary_csv_and_laplace_run(tmp_path):
    rows = run(RunConfig(scenario="laplace_droplet", meshes=(16, 24)), tmp_path)
    assert [r["mesh"] for r in rows] == [16, 24]
    with open(tmp_path / "summary.csv", newline="") as fh:
        data = list(csv.DictReader(fh))
    assert set(data[0]) == {"scenario", "mesh", "quantity", "value"}
    jumps = [float(d["value"]) for d in data if d["quantity"] == "jump"]
    assert len(jumps) == 2 and all(abs(j - 0.625) < 0.05 for j in jumps)
    assert (tmp_path / "laplace.csv").exists()


def test_cart_manufactured_run(tmp_path):
    run(RunConfig(scenario="elliptic_cart_manufactured", meshes=(16, 32)), tmp_path)
    with open(tmp_path / "convergence.csv", newline="") as fh:
        data = list(csv.DictReader(fh))
    assert len(data) == 2
    l2 = [float(d["L2"]) for d in data]
    assert l2[1] < l2[0] / 3
