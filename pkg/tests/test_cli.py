import json

import numpy as np
import pytest

from kil import cli
from kil.exceptions import ConfigError

from conftest import G0_GAUSS_03, cauchy_eigenvalue_closed


def write_config(tmp_path, raw, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return str(path)


def base_config(**overrides):
    raw = {
        "schema_version": 1,
        "distribution": {"kind": "gaussian", "param": 0.3},
        "graphon": {"kind": "er", "p": 0.5},
    }
    raw.update(overrides)
    return raw


def test_fmt_twelve_significant_digits():
    assert cli.fmt(1.0 / 3.0) == "0.333333333333"
    assert cli.fmt(2) == "2"
    assert cli.fmt(1234.5) == "1234.5"


def test_config_round_trip():
    raw = base_config(seed=7, replicas=3,
                      simulation={"n": 100, "dt": 0.05},
                      k_grid={"min": 0.1, "max": 1.0, "count": 5})
    cfg = cli.ExperimentConfig.from_dict(raw)
    again = cli.ExperimentConfig.from_dict(cfg.to_dict())
    assert cfg == again


def test_config_requires_schema_version():
    raw = base_config()
    del raw["schema_version"]
    with pytest.raises(ConfigError):
        cli.ExperimentConfig.from_dict(raw)
    with pytest.raises(ConfigError):
        cli.ExperimentConfig.from_dict(base_config(schema_version=2))


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        cli.ExperimentConfig.from_dict(base_config(extra=1))
    with pytest.raises(ConfigError):
        cli.ExperimentConfig.from_dict(
            base_config(distribution={"kind": "gaussian", "param": 0.3,
                                      "sigma": 0.3}))
    with pytest.raises(ConfigError):
        cli.ExperimentConfig.from_dict(
            base_config(simulation={"n": 10, "steps": 7}))


def test_config_rejects_invalid_parameters():
    with pytest.raises(ConfigError):
        cli.ExperimentConfig.from_dict(
            base_config(graphon={"kind": "er", "p": 1.5}))
    with pytest.raises(ConfigError):
        cli.ExperimentConfig.from_dict(
            base_config(distribution={"kind": "gaussian", "param": -1.0}))


def test_invalid_config_exits_nonzero(tmp_path, capsys):
    path = write_config(tmp_path, base_config(graphon={"kind": "er",
                                                       "p": 1.5}))
    code = cli.main(["predict", "--config", path,
                     "--out", str(tmp_path)])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_malformed_json_exits_nonzero(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert cli.main(["predict", "--config", str(path)]) == 2


def test_predict_command(tmp_path, capsys):
    path = write_config(tmp_path, base_config())
    code = cli.main(["predict", "--config", path, "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "k_c" in out
    report = json.loads((tmp_path / "predict.json").read_text())
    assert report["k_c"] == pytest.approx(1.0 / (0.5 * G0_GAUSS_03),
                                          rel=1e-9)
    assert "k_c_minus" not in report


def test_predict_command_sw_reports_both_branches(tmp_path):
    path = write_config(tmp_path, base_config(
        graphon={"kind": "sw", "p": 0.1, "r": 0.3}))
    assert cli.main(["predict", "--config", path,
                     "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "predict.json").read_text())
    assert report["k_c"] > 0
    assert report["k_c_minus"] < 0


def test_curve_command_deterministic_output(tmp_path):
    path = write_config(tmp_path, base_config(
        y_grid={"max": 4.0, "count": 21}))
    assert cli.main(["curve", "--config", path, "--out", str(tmp_path)]) == 0
    data = (tmp_path / "curve.csv").read_bytes()
    assert b"\r" not in data
    lines = data.decode().splitlines()
    assert lines[0] == "y,re,im"
    assert len(lines) == 22
    mid = lines[1 + 10].split(",")
    assert float(mid[0]) == 0.0
    assert float(mid[1]) == pytest.approx(G0_GAUSS_03, abs=1e-8)
    assert float(mid[2]) == pytest.approx(0.0, abs=1e-9)
    assert (tmp_path / "curve.gp").exists()

    assert cli.main(["curve", "--config", path, "--out", str(tmp_path)]) == 0
    assert (tmp_path / "curve.csv").read_bytes() == data


def test_eig_command_matches_closed_form(tmp_path):
    path = write_config(tmp_path, base_config(
        distribution={"kind": "cauchy", "param": 0.5},
        graphon=None, mu=1.0,
        k_grid={"min": 0.8, "max": 2.0, "count": 13}))
    assert cli.main(["eig", "--config", path, "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "eig.csv").read_text().splitlines()
    assert lines[0] == "K,re_lambda,im_lambda"
    for line in lines[1:]:
        k, re, im = map(float, line.split(","))
        assert re == pytest.approx(cauchy_eigenvalue_closed(k, 0.5),
                                   abs=1e-8)
        assert im == pytest.approx(0.0, abs=1e-8)


def test_sweep_command_empty_grid(tmp_path):
    path = write_config(tmp_path, base_config(
        simulation={"n": 50},
        k_grid={"min": 0.1, "max": 1.0, "count": 0}))
    assert cli.main(["sweep", "--config", path, "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines == ["K,mean_r,std_r,mean_h_mode,n,seed_count"]
    assert (tmp_path / "sweep.gp").exists()


def test_sweep_command_small_run(tmp_path):
    path = write_config(tmp_path, base_config(
        simulation={"n": 60, "dt": 0.05, "t_transient": 2,
                    "t_average": 50},
        k_grid={"min": 0.3, "max": 0.9, "count": 3},
        replicas=2, seed=11))
    assert cli.main(["sweep", "--config", path, "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert len(lines) == 4
    for line in lines[1:]:
        fields = line.split(",")
        assert len(fields) == 6
        assert fields[4] == "60"
        assert fields[5] == "2"


def test_seed_flag_overrides_config(tmp_path):
    raw = base_config(simulation={"n": 60, "dt": 0.05, "t_transient": 2,
                                  "t_average": 50},
                      k_grid={"min": 0.5, "max": 0.5, "count": 1},
                      replicas=1, seed=11)
    path = write_config(tmp_path, raw)
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert cli.main(["sweep", "--config", path, "--out", str(out_a)]) == 0
    assert cli.main(["sweep", "--config", path, "--out", str(out_b),
                     "--seed", "99"]) == 0
    a = (out_a / "sweep.csv").read_text()
    b = (out_b / "sweep.csv").read_text()
    assert a != b


def test_threads_resolution(monkeypatch):
    parser = cli.build_parser()
    args = parser.parse_args(["sweep", "--config", "x", "--threads", "3"])
    assert cli._resolve_threads(args) == 3
    args = parser.parse_args(["sweep", "--config", "x"])
    monkeypatch.setenv("KIL_THREADS", "2")
    assert cli._resolve_threads(args) == 2
    monkeypatch.setenv("KIL_THREADS", "lots")
    with pytest.raises(ConfigError):
        cli._resolve_threads(args)
    monkeypatch.delenv("KIL_THREADS")
    assert cli._resolve_threads(args) == 1
